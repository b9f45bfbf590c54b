//! Splitting a gate into transpositions along an adjacency relation.

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::word::Word;

/// Decompose `gate` into transpositions whose endpoints satisfy `adjacency`.
/// Applying the returned transpositions in list order (first entry first)
/// reproduces the gate.
///
/// Orbits are processed by increasing smallest encoded index, each cycle
/// unwound as `(x, F(x)), (x, F^2(x)), ...`. A pair that is not already
/// adjacent is expanded into a palindrome of adjacent transpositions along a
/// shortest breadth-first path; if no path exists the decomposition fails.
pub fn decompose_to_transpositions<A>(gate: &Gate, adjacency: A) -> Result<Vec<(Word, Word)>>
where
    A: Fn(&Word, &Word) -> bool,
{
    let k = gate.k();
    let n = gate.arity();
    let len = gate.table_len();
    let word = |index: usize| Word::from_index(k, n, index).expect("index in range");

    let mut out = Vec::new();
    let mut seen = vec![false; len];
    for start in 0..len {
        if seen[start] || gate.apply_index(start) == start {
            seen[start] = true;
            continue;
        }
        // Unwind the cycle through `start`.
        let mut point = start;
        loop {
            seen[point] = true;
            point = gate.apply_index(point);
            if point == start {
                break;
            }
        }
        let mut image = gate.apply_index(start);
        while image != start {
            push_pair(gate, &adjacency, word(start), word(image), &mut out)?;
            image = gate.apply_index(image);
        }
    }
    Ok(out)
}

fn push_pair<A>(
    gate: &Gate,
    adjacency: &A,
    u: Word,
    v: Word,
    out: &mut Vec<(Word, Word)>,
) -> Result<()>
where
    A: Fn(&Word, &Word) -> bool,
{
    if adjacency(&u, &v) {
        out.push((u, v));
        return Ok(());
    }
    let path = bfs_path(gate.k(), gate.arity(), &u, &v, adjacency)?;
    // tau_{u,v} = B tau_{y0,y1} B^{-1} along the path y0..yp: descend the
    // path edges, apply the first edge, then climb back up.
    let p = path.len() - 1;
    for i in (1..p).rev() {
        out.push((path[i].clone(), path[i + 1].clone()));
    }
    out.push((path[0].clone(), path[1].clone()));
    for i in 1..p {
        out.push((path[i].clone(), path[i + 1].clone()));
    }
    Ok(())
}

fn bfs_path<A>(k: u32, n: usize, from: &Word, to: &Word, adjacency: &A) -> Result<Vec<Word>>
where
    A: Fn(&Word, &Word) -> bool,
{
    let len = crate::checked_table_len(k, n)?;
    let word = |index: usize| Word::from_index(k, n, index).expect("index in range");
    let start = from.index();
    let goal = to.index();
    let mut parent: Vec<usize> = vec![usize::MAX; len];
    parent[start] = start;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    while let Some(current) = queue.pop_front() {
        if current == goal {
            let mut path = vec![word(goal)];
            let mut at = goal;
            while at != start {
                at = parent[at];
                path.push(word(at));
            }
            path.reverse();
            return Ok(path);
        }
        let cw = word(current);
        for next in 0..len {
            if parent[next] == usize::MAX && adjacency(&cw, &word(next)) {
                parent[next] = current;
                queue.push_back(next);
            }
        }
    }
    Err(Error::Disconnected { from: from.clone(), to: to.clone() })
}

/// Words differing in exactly one position.
pub(crate) fn differ_one_position(u: &Word, v: &Word) -> bool {
    u.len() == v.len()
        && u.symbols()
            .iter()
            .zip(v.symbols())
            .filter(|(a, b)| a != b)
            .count()
            == 1
}

/// Words with equal symbol multisets.
pub(crate) fn same_multiset(u: &Word, v: &Word) -> bool {
    let mut a = u.symbols().to_vec();
    let mut b = v.symbols().to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

//! Synthesizer for gates preserving the marked-symbol count modulo m, over
//! the split-last partition library extended with `CC_m`.

use std::sync::Arc;

use crate::analysis::{self, Partition};
use crate::circuit::{Circuit, CircuitBuilder};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::synth::decompose::decompose_to_transpositions;
use crate::synth::lambda::LambdaCtx;
use crate::word::Word;

/// Synthesize a mod-m-preserving gate. Count-preserving transpositions stay
/// inside the partition library; each residual jump of m in the marked count
/// conjugates one `CC_m` placement with a controlled symbol toggle on a
/// scratch wire.
pub fn synth_mod_preserving(gate: &Gate, m: u32) -> Result<Circuit> {
    let k = gate.k();
    if k < 3 {
        return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
    }
    if m < 1 {
        return Err(Error::Parse { line: 0, message: "modulus must be positive".into() });
    }
    if let Some(witness) = analysis::mod_preserving_violation(gate, m)? {
        return Err(Error::NotModPreserving { m, witness });
    }
    let marked = k - 1;
    let ctx = LambdaCtx::new(&Partition::split_last(k)?)?;
    let cc = crate::constructors::make_cc(m, k)?.shared();

    let count = |w: &Word| w.symbols().iter().filter(|&&s| s == marked).count();
    let pairs = decompose_to_transpositions(gate, |u, v| {
        (count(u) % m as usize) == (count(v) % m as usize)
    })?;
    let n = gate.arity();
    let mut builder = CircuitBuilder::new(k, n);
    for (u, v) in pairs {
        let sub = mod_transposition(&ctx, &cc, u.symbols(), v.symbols(), m)?;
        builder.sub(sub, (0..n).collect());
    }
    builder.build()
}

fn count_marked(marked: u32, w: &[u32]) -> usize {
    w.iter().filter(|&&s| s == marked).count()
}

/// Transposition of two words whose marked counts agree modulo m.
fn mod_transposition(
    ctx: &LambdaCtx,
    cc: &Arc<Gate>,
    u: &[u32],
    v: &[u32],
    m: u32,
) -> Result<Arc<Circuit>> {
    let k = ctx.k();
    let marked = k - 1;
    let cu = count_marked(marked, u);
    let cv = count_marked(marked, v);
    if cu == cv {
        return ctx.lambda_transposition(u, v);
    }
    let (lo, hi) = if cu < cv { (u, v) } else { (v, u) };
    let (clo, chi) = (cu.min(cv), cu.max(cv));
    let jumps = (chi - clo) / m as usize;

    // Path from lo to hi raising the marked count by m per step; the
    // intermediate words mark the leading unmarked positions of lo.
    let mut path: Vec<Vec<u32>> = vec![lo.to_vec()];
    for i in 1..jumps {
        let mut w = lo.to_vec();
        let mut left = i * m as usize;
        for s in w.iter_mut() {
            if left == 0 {
                break;
            }
            if *s != marked {
                *s = marked;
                left -= 1;
            }
        }
        path.push(w);
    }
    path.push(hi.to_vec());

    let n = lo.len();
    let mut builder = CircuitBuilder::new(k, n);
    let all_wires: Vec<usize> = (0..n).collect();
    let steps = path.len() - 1;
    let mut order: Vec<usize> = (2..=steps).rev().collect();
    order.push(1);
    order.extend(2..=steps);
    for idx in order {
        let sub = mod_jump(ctx, cc, &path[idx - 1], &path[idx], m)?;
        builder.sub(sub, all_wires.clone());
    }
    Ok(builder.build()?.shared())
}

/// Transposition of two words whose marked counts differ by exactly m:
/// conjugate both endpoints into the normal form `1^m s` versus `k^m s`
/// with count-preserving transpositions, then toggle through `CC_m`.
fn mod_jump(
    ctx: &LambdaCtx,
    cc: &Arc<Gate>,
    x: &[u32],
    y: &[u32],
    m: u32,
) -> Result<Arc<Circuit>> {
    let k = ctx.k();
    let marked = k - 1;
    let n = x.len();
    debug_assert_eq!(count_marked(marked, y), count_marked(marked, x) + m as usize);

    // Positions that will carry the extra marked symbols: the first m
    // positions where x is unmarked.
    let jump_positions: Vec<usize> = (0..n)
        .filter(|&j| x[j] != marked)
        .take(m as usize)
        .collect();
    debug_assert_eq!(jump_positions.len(), m as usize);

    // y rearranged to mark exactly x's marked positions plus the jump
    // positions, remaining symbols sorted into the leftover slots.
    let y1 = {
        let mut w = vec![0u32; n];
        let mut rest: Vec<u32> = y.iter().copied().filter(|&s| s != marked).collect();
        rest.sort_unstable();
        let mut rest = rest.into_iter();
        for j in 0..n {
            if x[j] == marked || jump_positions.contains(&j) {
                w[j] = marked;
            } else {
                w[j] = rest.next().expect("unmarked symbols fill the rest");
            }
        }
        w
    };
    // Agree with x off the jump positions, marked on them.
    let y2 = {
        let mut w = x.to_vec();
        for &j in &jump_positions {
            w[j] = marked;
        }
        w
    };
    // x with the jump positions set to symbol 1.
    let x1 = {
        let mut w = x.to_vec();
        for &j in &jump_positions {
            w[j] = 0;
        }
        w
    };

    let mut builder = CircuitBuilder::new(k, n);
    let all_wires: Vec<usize> = (0..n).collect();
    let mut conjugators: Vec<Arc<Circuit>> = Vec::new();
    if y1 != *y {
        conjugators.push(ctx.lambda_transposition(y, &y1)?);
    }
    if y2 != y1 {
        conjugators.push(ctx.lambda_transposition(&y1, &y2)?);
    }
    if x1 != *x {
        conjugators.push(ctx.lambda_transposition(x, &x1)?);
    }

    // Core on x1 <-> y2: a controlled toggle of a scratch wire from 2 to 1,
    // CC_m against the jump positions, and the toggle back.
    let core = {
        let ctrl_positions: Vec<usize> = (0..n).filter(|j| !jump_positions.contains(j)).collect();
        let ctrl_word: Vec<u32> = ctrl_positions.iter().map(|&j| x[j]).collect();
        let mut cb = CircuitBuilder::new(k, n);
        let z = cb.ancilla(1);
        let toggle = ctx.inner.ctrl_tau(&ctrl_word, 0, 1)?;
        let mut toggle_wires = ctrl_positions.clone();
        toggle_wires.push(z);
        cb.sub(Arc::clone(&toggle), toggle_wires.clone());
        let mut cc_wires = vec![z];
        cc_wires.extend(&jump_positions);
        cb.gate(Arc::clone(cc), cc_wires);
        cb.sub(toggle, toggle_wires);
        cb.build()?.shared()
    };

    for c in &conjugators {
        builder.sub(Arc::clone(c), all_wires.clone());
    }
    builder.sub(core, all_wires.clone());
    for c in conjugators.iter().rev() {
        builder.sub(Arc::clone(c), all_wires.clone());
    }
    Ok(builder.build()?.shared())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{make_cc, make_tau};
    use crate::synth::GeneratorLibrary;

    fn w3(s: &str) -> Word {
        Word::parse(3, s).unwrap()
    }

    #[test]
    fn count_preserving_targets_avoid_cc() {
        let tau = make_tau(&w3("13"), &w3("31")).unwrap();
        let c = synth_mod_preserving(&tau, 2).unwrap();
        assert_eq!(c.extract_gate().unwrap(), tau);
        // no CC_2 placement anywhere
        let cc = make_cc(2, 3).unwrap();
        let flat = c.inline_all();
        assert!(flat.steps().iter().all(|p| match &p.op {
            crate::circuit::PlacedOp::Gate(g) => **g != cc,
            _ => false,
        }));
    }

    #[test]
    fn single_jump_uses_cc_once() {
        let tau = make_tau(&w3("11"), &w3("33")).unwrap();
        let c = synth_mod_preserving(&tau, 2).unwrap();
        assert_eq!(c.extract_gate().unwrap(), tau);
        let cc = make_cc(2, 3).unwrap();
        let flat = c.inline_all();
        let uses = flat
            .steps()
            .iter()
            .filter(|p| matches!(&p.op, crate::circuit::PlacedOp::Gate(g) if **g == cc))
            .count();
        assert_eq!(uses, 1);
        assert!(GeneratorLibrary::mod_gen(3, 2).unwrap().certifies(&c));
    }

    #[test]
    fn cc_gate_is_reachable() {
        let cc2 = make_cc(2, 3).unwrap();
        let c = synth_mod_preserving(&cc2, 2).unwrap();
        assert_eq!(c.extract_gate().unwrap(), cc2);
    }

    #[test]
    fn rejects_non_preserving_targets() {
        let tau = make_tau(&w3("1"), &w3("3")).unwrap();
        match synth_mod_preserving(&tau, 2) {
            Err(Error::NotModPreserving { m: 2, witness }) => assert_eq!(witness, w3("1")),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn marked_count_is_preserved_mod_m_after_every_step() {
        let tau = make_tau(&w3("11"), &w3("33")).unwrap();
        let circuit = synth_mod_preserving(&tau, 2).unwrap();
        let flat = circuit.inline_all();
        for index in 0..9 {
            let input = Word::from_index(3, 2, index).unwrap();
            let mut state = vec![0u32; flat.wire_count()];
            for (&w, &s) in flat.input_wires().iter().zip(input.symbols()) {
                state[w] = s;
            }
            for &(wire, sym) in flat.ancillas() {
                state[wire] = sym;
            }
            let marked_count =
                |st: &[u32]| st.iter().filter(|&&s| s == 2).count() as i64;
            let initial = marked_count(&state);
            for placement in flat.steps() {
                let gate = match &placement.op {
                    crate::circuit::PlacedOp::Gate(g) => g,
                    _ => unreachable!(),
                };
                let vals: Vec<u32> = placement.wires.iter().map(|&w| state[w]).collect();
                let out = gate.apply_index(crate::word::encode(3, &vals));
                let outw = crate::word::decode(3, vals.len(), out);
                for (&w, &s) in placement.wires.iter().zip(&outw) {
                    state[w] = s;
                }
                assert_eq!(
                    (marked_count(&state) - initial).rem_euclid(2),
                    0,
                    "marked count drifted off the residue class"
                );
            }
        }
    }

    #[test]
    fn double_jump_target() {
        // marked count changes by 4 = 2m on one orbit move
        let tau = make_tau(&w3("1111"), &w3("3333")).unwrap();
        let c = synth_mod_preserving(&tau, 2).unwrap();
        assert_eq!(c.extract_gate().unwrap(), tau);
    }
}

//! Recovering the classifying gate `CC_m` from any gate with invariant m,
//! and the tensor-power witness search that drives it.

use std::sync::Arc;

use crate::analysis::{self, Partition};
use crate::circuit::{Circuit, CircuitBuilder};
use crate::constructors::{make_controlled, make_perm_gate, wire_swap};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::synth::lambda::{synth_cons_lambda, LambdaCtx};
use crate::word::{self, Word};

/// Find `(t, w)` with the marked count of `F^{(x)t}(w)` exceeding that of
/// `w` by exactly `m(F)`. Fails when the gate preserves the count outright.
///
/// If some single input already realizes the invariant the witness is that
/// word; otherwise a breadth-first search combines count differences of
/// minimal block count into a concatenation.
pub fn find_tensor_witness(gate: &Gate) -> Result<(u32, Word)> {
    let profile = analysis::mod_profile(gate);
    let m = profile.gcd_value as i64;
    if m == 0 {
        return Err(Error::NoTensorWitness);
    }
    let k = gate.k();
    let n = gate.arity();
    let marked = k - 1;

    // First witness word per difference value, in input order.
    let mut samples: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    let mut input = vec![0u32; n];
    let mut output = vec![0u32; n];
    for (i, o) in gate.entries() {
        word::decode_into(k, i, &mut input);
        word::decode_into(k, o, &mut output);
        let d = output.iter().filter(|&&s| s == marked).count() as i64
            - input.iter().filter(|&&s| s == marked).count() as i64;
        samples.entry(d).or_insert(i);
    }

    if let Some(&index) = samples.get(&m) {
        return Ok((1, Word::from_index(k, n, index)?));
    }

    // Shortest nonneg combination of differences summing to m; partial sums
    // can always be kept within m + max|d| by reordering, so the search
    // space is a bounded interval.
    let max_abs = samples.keys().map(|d| d.unsigned_abs()).max().unwrap_or(0) as i64;
    let bound = m + max_abs;
    let offset = bound;
    let size = (2 * bound + 1) as usize;
    let mut prev: Vec<Option<(usize, i64)>> = vec![None; size];
    let at = |s: i64| (s + offset) as usize;
    let mut queue = std::collections::VecDeque::new();
    prev[at(0)] = Some((usize::MAX, 0));
    queue.push_back(0i64);
    while let Some(sum) = queue.pop_front() {
        if sum == m {
            break;
        }
        for &d in samples.keys() {
            if d == 0 {
                continue;
            }
            let next = sum + d;
            if next.abs() <= bound && prev[at(next)].is_none() {
                prev[at(next)] = Some((at(sum), d));
                queue.push_back(next);
            }
        }
    }
    if prev[at(m)].is_none() {
        return Err(Error::NoTensorWitness);
    }
    let mut diffs = Vec::new();
    let mut cursor = at(m);
    while let Some((parent, d)) = prev[cursor] {
        if parent == usize::MAX {
            break;
        }
        diffs.push(d);
        cursor = parent;
    }
    diffs.reverse();
    let mut symbols = Vec::with_capacity(diffs.len() * n);
    for d in &diffs {
        let index = samples[d];
        symbols.extend(word::decode(k, n, index));
    }
    Ok((diffs.len() as u32, Word::new(k, symbols)?))
}

/// Build a circuit computing `CC_m` from the split-last library plus a seed
/// gate with invariant m.
///
/// The involution `G` pairs the seed with its inverse and swaps the blocks;
/// a tensor witness pins words `u`, `v` with counts m apart; the rearranger
/// `H` (two count-preserving transpositions) normalizes them to runs of
/// marked symbols; and a guarded sandwich around `R = H G^t H` turns the
/// normalized toggle into the controlled gate.
pub fn synth_cc_from_gate(gate: &Gate) -> Result<Circuit> {
    let k = gate.k();
    if k < 3 {
        return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
    }
    let m = analysis::m_invariant(gate);
    if m == 0 {
        return Err(Error::NoTensorWitness);
    }
    let marked = k - 1;
    let a = gate.arity();
    let seed = gate.clone().shared();

    // G = block swap after (seed (x) seed^{-1}), as a dense gate for the
    // witness search and as a placement block for the circuit.
    let inverse = gate.inverse();
    let sigma: Vec<usize> = (0..2 * a).map(|i| (i + a) % (2 * a)).collect();
    let g_dense = make_perm_gate(k, &sigma)?.compose(&gate.tensor(&inverse)?)?;
    let order = gate.order();

    let (t, u_word) = find_tensor_witness(&g_dense)?;
    let t = t as usize;
    let n = t * 2 * a;
    let u: Vec<u32> = u_word.symbols().to_vec();
    let mut v = Vec::with_capacity(n);
    for block in u.chunks(2 * a) {
        let idx = word::encode(k, block);
        v.extend(word::decode(k, 2 * a, g_dense.apply_index(idx)));
    }
    let cu = u.iter().filter(|&&s| s == marked).count();
    let cv = v.iter().filter(|&&s| s == marked).count();
    debug_assert_eq!(cv, cu + m as usize);

    let run = |count: usize| -> Vec<u32> {
        let mut w = vec![0u32; n];
        for slot in w.iter_mut().take(count) {
            *slot = marked;
        }
        w
    };
    let u_norm = run(cu);
    let v_norm = run(cv);

    let ctx = LambdaCtx::new(&Partition::split_last(k)?)?;

    // H: two disjoint count-preserving transpositions, its own inverse.
    let h_circuit = {
        let mut hb = CircuitBuilder::new(k, n);
        let wires: Vec<usize> = (0..n).collect();
        if u != u_norm {
            hb.sub(ctx.lambda_transposition(&u, &u_norm)?, wires.clone());
        }
        if v != v_norm {
            hb.sub(ctx.lambda_transposition(&v, &v_norm)?, wires);
        }
        hb.build()?.shared()
    };
    let h_map = |w: &[u32]| -> Vec<u32> {
        if w == u.as_slice() {
            u_norm.clone()
        } else if w == u_norm.as_slice() {
            u.clone()
        } else if w == v.as_slice() {
            v_norm.clone()
        } else if w == v_norm.as_slice() {
            v.clone()
        } else {
            w.to_vec()
        }
    };

    // G as a placement block: seed, seed^{order-1} on the mirror block, then
    // free wire crossings swapping the halves.
    let g_circuit = {
        let mut gb = CircuitBuilder::new(k, 2 * a);
        gb.gate(Arc::clone(&seed), (0..a).collect());
        for _ in 0..order - 1 {
            gb.gate(Arc::clone(&seed), (a..2 * a).collect());
        }
        let crossing = wire_swap(k)?.shared();
        for i in 0..a {
            gb.gate(Arc::clone(&crossing), vec![i, a + i]);
        }
        gb.build()?.shared()
    };

    let r_circuit = {
        let mut rb = CircuitBuilder::new(k, n);
        let wires: Vec<usize> = (0..n).collect();
        rb.sub(Arc::clone(&h_circuit), wires.clone());
        for block in 0..t {
            rb.sub(Arc::clone(&g_circuit), (block * 2 * a..(block + 1) * 2 * a).collect());
        }
        rb.sub(Arc::clone(&h_circuit), wires);
        rb.build()?.shared()
    };

    // Fixed word of G^t and its image under H, fed to the guard ancillas.
    let w_fixed: Vec<u32> = {
        let c1 = vec![0u32; a];
        let image = word::decode(k, a, gate.apply_index(word::encode(k, &c1)));
        let mut w = Vec::with_capacity(n);
        for _ in 0..t {
            w.extend(&c1);
            w.extend(&image);
        }
        w
    };
    let w_guard = h_map(&w_fixed);

    // Conditional swaps compiled over the partition library.
    let crossing = wire_swap(k)?;
    let split = Partition::split_last(k)?;
    let mut ctrl_lo = vec![0u32; m as usize + 1];
    let cond_lo = {
        ctrl_lo[0] = 0;
        let gate = make_controlled(&Word::new(k, ctrl_lo.clone())?, &crossing)?;
        synth_cons_lambda(&gate, &split)?.shared()
    };
    let cond_hi = {
        let mut ctrl = vec![marked; m as usize + 1];
        ctrl[0] = 0;
        let gate = make_controlled(&Word::new(k, ctrl)?, &crossing)?;
        synth_cons_lambda(&gate, &split)?.shared()
    };
    let cond_pair = {
        let gate = make_controlled(&Word::new(k, vec![0])?, &crossing)?;
        synth_cons_lambda(&gate, &split)?.shared()
    };

    // Main schedule on m + 1 input wires: control, then the window.
    let mut builder = CircuitBuilder::new(k, m as usize + 1);
    let mut x_wires = vec![0usize; n];
    for (j, slot) in x_wires.iter_mut().enumerate() {
        *slot = if j < cu {
            builder.ancilla(marked)
        } else if j < cv {
            1 + (j - cu)
        } else {
            builder.ancilla(0)
        };
    }
    let y_wires: Vec<usize> = w_guard.iter().map(|&s| builder.ancilla(s)).collect();
    let z1 = builder.ancilla(0);
    let z2 = builder.ancilla(1);

    let mut guard_wires = vec![0usize];
    guard_wires.extend(1..=m as usize);
    guard_wires.push(z1);
    guard_wires.push(z2);

    builder.sub(Arc::clone(&cond_lo), guard_wires.clone());
    builder.sub(Arc::clone(&cond_hi), guard_wires.clone());
    for j in 0..n {
        builder.sub(Arc::clone(&cond_pair), vec![z1, x_wires[j], y_wires[j]]);
    }
    builder.sub(r_circuit, x_wires.clone());
    for j in 0..n {
        builder.sub(Arc::clone(&cond_pair), vec![z1, x_wires[j], y_wires[j]]);
    }
    builder.sub(cond_hi, guard_wires.clone());
    builder.sub(cond_lo, guard_wires);
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{make_cc, make_tau};
    use crate::synth::GeneratorLibrary;

    #[test]
    fn witness_for_cc2_is_immediate() {
        let cc2 = make_cc(2, 3).unwrap();
        let (t, w) = find_tensor_witness(&cc2).unwrap();
        assert_eq!(t, 1);
        assert_eq!(w, Word::parse(3, "111").unwrap());
    }

    #[test]
    fn witness_satisfies_the_defining_equation() {
        let f = make_cc(2, 3).unwrap().tensor(&make_cc(3, 3).unwrap()).unwrap();
        assert_eq!(analysis::m_invariant(&f), 1);
        let (t, w) = find_tensor_witness(&f).unwrap();
        let n = f.arity();
        assert_eq!(w.len(), t as usize * n);
        let mut diff = 0i64;
        for block in w.symbols().chunks(n) {
            let before = block.iter().filter(|&&s| s == 2).count() as i64;
            let idx = crate::word::encode(3, block);
            let out = crate::word::decode(3, n, f.apply_index(idx));
            let after = out.iter().filter(|&&s| s == 2).count() as i64;
            diff += after - before;
        }
        assert_eq!(diff, 1);
    }

    #[test]
    fn conservative_gates_have_no_witness() {
        let id = Gate::identity(3, 2).unwrap();
        assert!(matches!(find_tensor_witness(&id), Err(Error::NoTensorWitness)));
        let tau = make_tau(&Word::parse(3, "13").unwrap(), &Word::parse(3, "31").unwrap()).unwrap();
        assert!(matches!(find_tensor_witness(&tau), Err(Error::NoTensorWitness)));
    }

    #[test]
    fn recovers_cc2_from_itself() {
        let cc2 = make_cc(2, 3).unwrap();
        let circuit = synth_cc_from_gate(&cc2).unwrap();
        assert_eq!(circuit.extract_gate().unwrap(), cc2);
        let lib = GeneratorLibrary::lambda_gen(&Partition::split_last(3).unwrap())
            .unwrap()
            .with_extra_gate("seed", cc2.shared());
        assert!(lib.certifies(&circuit));
    }

    #[test]
    fn rejects_count_preserving_seeds() {
        let id = Gate::identity(3, 2).unwrap();
        assert!(matches!(synth_cc_from_gate(&id), Err(Error::NoTensorWitness)));
    }
}

//! Structural maps on gates: symbol-permutation conjugation, base change to
//! a one-larger alphabet with its circuit transfer, and the parity
//! certificate showing the `T_j` family is not finitely generated.

use std::fmt;

use crate::circuit::{Circuit, PlacedOp};
use crate::constructors::make_t;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::word;

/// Conjugate a gate by a symbol permutation: `F^sigma` maps `a` to
/// `sigma(F(sigma^{-1}(a)))` applied coordinatewise. This is a left action:
/// `(F^sigma)^tau = F^{tau . sigma}` with `sigma` acting first.
pub fn act_sigma(gate: &Gate, sigma: &[u32]) -> Result<Gate> {
    let k = gate.k();
    if sigma.len() != k as usize {
        return Err(Error::MalformedSymbolPermutation(sigma.to_vec()));
    }
    let mut seen = vec![false; k as usize];
    for &s in sigma {
        if s >= k || seen[s as usize] {
            return Err(Error::MalformedSymbolPermutation(sigma.to_vec()));
        }
        seen[s as usize] = true;
    }
    let mut sigma_inv = vec![0u32; k as usize];
    for (i, &s) in sigma.iter().enumerate() {
        sigma_inv[s as usize] = i as u32;
    }
    let n = gate.arity();
    let len = gate.table_len();
    let mut image = vec![0u32; len];
    let mut buf = vec![0u32; n];
    for index in 0..len {
        word::decode_into(k, index, &mut buf);
        for s in buf.iter_mut() {
            *s = sigma_inv[*s as usize];
        }
        let mid = gate.apply_index(word::encode(k, &buf));
        word::decode_into(k, mid, &mut buf);
        for s in buf.iter_mut() {
            *s = sigma[*s as usize];
        }
        image[index] = word::encode(k, &buf) as u32;
    }
    Gate::new(k, n, image)
}

/// Lift a gate to the alphabet with one more symbol: the lifted gate fixes
/// any input containing the new symbol and acts as the original elsewhere.
pub fn base_change(gate: &Gate) -> Result<Gate> {
    let k = gate.k();
    let big = k + 1;
    let n = gate.arity();
    let len = crate::checked_table_len(big, n)?;
    let mut image = vec![0u32; len];
    let mut buf = vec![0u32; n];
    for (index, slot) in image.iter_mut().enumerate() {
        word::decode_into(big, index, &mut buf);
        if buf.contains(&k) {
            *slot = index as u32;
        } else {
            let small = word::encode(k, &buf);
            word::decode_into(k, gate.apply_index(small), &mut buf);
            *slot = word::encode(big, &buf) as u32;
        }
    }
    Gate::new(big, n, image)
}

/// Transfer a circuit to the alphabet with one more symbol so that
/// extraction commutes with [`base_change`]: each step becomes the base
/// change of that step's action on the full wire set. Lifting placements
/// gate-by-gate on their own wires would not commute — an input holding the
/// new symbol on an untouched wire must freeze the whole step, not just the
/// placements meeting that wire.
pub fn lift_circuit(circuit: &Circuit) -> Result<Circuit> {
    let k = circuit.k();
    for &(_, sym) in circuit.ancillas() {
        debug_assert!(sym < k);
    }
    let flat = circuit.inline_all();
    let wires = flat.wire_count();
    let all_wires: Vec<usize> = (0..wires).collect();
    let mut steps = Vec::with_capacity(flat.steps().len());
    for placement in flat.steps() {
        let gate = match &placement.op {
            PlacedOp::Gate(g) => g,
            PlacedOp::Circuit(_) => unreachable!("inline_all leaves only gates"),
        };
        let full = embed_on_wires(gate, &placement.wires, wires)?;
        steps.push(crate::circuit::Placement {
            op: PlacedOp::Gate(base_change(&full)?.shared()),
            wires: all_wires.clone(),
        });
    }
    Circuit::new(k + 1, flat.input_wires().to_vec(), flat.ancillas().to_vec(), steps)
}

/// The gate's action extended by the identity to `wires` wires, with the
/// gate applied to the listed wire positions.
fn embed_on_wires(gate: &Gate, wires: &[usize], wire_count: usize) -> Result<Gate> {
    let k = gate.k();
    let len = crate::checked_table_len(k, wire_count)?;
    let mut image = vec![0u32; len];
    let mut state = vec![0u32; wire_count];
    let mut sub = vec![0u32; wires.len()];
    for (index, slot) in image.iter_mut().enumerate() {
        word::decode_into(k, index, &mut state);
        for (b, &w) in sub.iter_mut().zip(wires) {
            *b = state[w];
        }
        let out = gate.apply_index(word::encode(k, &sub));
        word::decode_into(k, out, &mut sub);
        for (&w, &s) in wires.iter().zip(&sub) {
            state[w] = s;
        }
        *slot = word::encode(k, &state) as u32;
    }
    Gate::new(k, wire_count, image)
}

/// Flip count of one placement in the parity certificate. `control_wires`
/// are the designated wires used as controls; any remaining controls of the
/// gate sit on always-satisfied scratch wires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementCount {
    pub gate_index: u32,
    pub control_wires: Vec<usize>,
    pub flip_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    UnreachableParity,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::UnreachableParity => write!(f, "UNREACHABLE_PARITY"),
        }
    }
}

/// Machine-checked parity certificate that `T_0..T_n` cannot produce
/// `T_{n+1}`: over the designated inputs, every available placement flips
/// the target wire an even number of times, while the goal gate flips it
/// exactly once. Symmetric differences of even sets stay even, so no
/// composition reaches the goal.
#[derive(Debug, Clone)]
pub struct NonFinGenReport {
    pub k: u32,
    pub n: u32,
    /// Designated control wires (the goal gate needs n+1 of them).
    pub designated_wires: usize,
    /// Number of designated inputs scanned: 2^(n+1).
    pub designated_inputs: u64,
    /// The reduced search space the scan quantifies over.
    pub assumptions: Vec<String>,
    /// One entry per (gate index, control-wire subset), all verified even.
    pub even_counts: Vec<PlacementCount>,
    /// The goal gate's count, verified to be exactly one.
    pub extremal: PlacementCount,
    pub conclusion: Conclusion,
}

impl NonFinGenReport {
    pub fn summary(&self) -> String {
        format!(
            "T_0..T_{} all even over {} designated inputs; T_{} count {}; {}",
            self.n,
            self.designated_inputs,
            self.n + 1,
            self.extremal.flip_count,
            self.conclusion
        )
    }
}

/// Run the parity scan for the family `T_0..T_{n+1}` over a k-symbol
/// alphabet, `k >= 3`. Budget grows as `2^n`.
pub fn nonfingen_certificate(n: u32, k: u32) -> Result<NonFinGenReport> {
    if k < 3 {
        return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
    }
    // The goal gate T_{n+1} has n+1 controls, so the scan runs on n+1
    // designated control wires plus the target wire.
    let wires = n as usize + 1;
    if wires > 24 {
        return Err(Error::ChainBudgetExceeded { points: wires, budget: 24 });
    }
    let inputs: u64 = 1 << wires;

    let assumptions = vec![
        "every scratch wire holds symbol 1 and is used only as a control input".to_string(),
        "every placed gate targets the designated output wire".to_string(),
        format!(
            "designated inputs: control wires range over {{1,2}}^{wires} by binary pattern, target wire holds 2"
        ),
    ];

    // Designated input r: control wire i holds 1 when bit i of r is set,
    // otherwise 2; the target wire holds 2.
    let flips = |gate: &Gate, controls: &[usize]| -> u64 {
        let arity = gate.arity();
        let mut count = 0u64;
        let mut input = vec![0u32; arity];
        let mut output = vec![0u32; arity];
        for r in 0..inputs {
            // Real controls take designated values; the rest stay at 1.
            for slot in input.iter_mut() {
                *slot = 0;
            }
            for (pos, &wire) in controls.iter().enumerate() {
                input[pos] = if (r >> wire) & 1 == 1 { 0 } else { 1 };
            }
            input[arity - 1] = 1; // target wire holds symbol 2
            let encoded = word::encode(k, &input);
            word::decode_into(k, gate.apply_index(encoded), &mut output);
            if output[arity - 1] != input[arity - 1] {
                count += 1;
            }
        }
        count
    };

    let mut even_counts = Vec::new();
    for i in 0..=n {
        let gate = make_t(i, k)?;
        // Place j <= i controls on designated wires; the other i - j controls
        // sit on scratch wires that always hold 1.
        for j in 0..=i.min(wires as u32) {
            for subset in subsets_of_size(wires, j as usize) {
                let count = flips(&gate, &subset);
                if count % 2 != 0 {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!(
                            "parity scan failed: T_{i} on wires {subset:?} flips {count} times"
                        ),
                    });
                }
                even_counts.push(PlacementCount {
                    gate_index: i,
                    control_wires: subset,
                    flip_count: count,
                });
            }
        }
    }

    let goal = make_t(n + 1, k)?;
    let all: Vec<usize> = (0..wires).collect();
    let goal_count = flips(&goal, &all);
    if goal_count != 1 {
        return Err(Error::Parse {
            line: 0,
            message: format!("goal gate flip count {goal_count}, expected exactly 1"),
        });
    }

    Ok(NonFinGenReport {
        k,
        n,
        designated_wires: wires,
        designated_inputs: inputs,
        assumptions,
        even_counts,
        extremal: PlacementCount { gate_index: n + 1, control_wires: all, flip_count: goal_count },
        conclusion: Conclusion::UnreachableParity,
    })
}

fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn walk(start: usize, n: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for next in start..n {
            current.push(next);
            walk(next + 1, n, size, current, out);
            current.pop();
        }
    }
    walk(0, n, size, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::constructors::{make_controlled, make_swap, make_tau};
    use crate::word::Word;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn w(k: u32, s: &str) -> Word {
        Word::parse(k, s).unwrap()
    }

    fn random_gate(rng: &mut ChaCha8Rng, k: u32, arity: usize) -> Gate {
        let len = (k as usize).pow(arity as u32);
        let mut image: Vec<u32> = (0..len as u32).collect();
        image.shuffle(rng);
        Gate::new(k, arity, image).unwrap()
    }

    fn random_sigma(rng: &mut ChaCha8Rng, k: u32) -> Vec<u32> {
        let mut sigma: Vec<u32> = (0..k).collect();
        sigma.shuffle(rng);
        sigma
    }

    #[test]
    fn act_sigma_examples() {
        let tau12 = make_tau(&w(3, "1"), &w(3, "2")).unwrap();
        assert_eq!(act_sigma(&tau12, &[0, 1, 2]).unwrap(), tau12);

        // conjugating tau_{1,2} by the swap of symbols 1 and 3 gives tau_{2,3}
        let sigma = [2u32, 1, 0];
        let tau23 = make_tau(&w(3, "2"), &w(3, "3")).unwrap();
        assert_eq!(act_sigma(&tau12, &sigma).unwrap(), tau23);

        assert!(act_sigma(&tau12, &[0, 0, 2]).is_err());
        assert!(act_sigma(&tau12, &[0, 1]).is_err());
    }

    #[test]
    fn act_sigma_is_a_left_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let f = random_gate(&mut rng, 3, 2);
            let sigma = random_sigma(&mut rng, 3);
            let tau = random_sigma(&mut rng, 3);
            // inverse law
            let mut sigma_inv = vec![0u32; 3];
            for (i, &s) in sigma.iter().enumerate() {
                sigma_inv[s as usize] = i as u32;
            }
            let back = act_sigma(&act_sigma(&f, &sigma).unwrap(), &sigma_inv).unwrap();
            assert_eq!(back, f);
            // composition law: (F^sigma)^tau = F^{tau . sigma}
            let lhs = act_sigma(&act_sigma(&f, &sigma).unwrap(), &tau).unwrap();
            let comp: Vec<u32> = (0..3).map(|i| tau[sigma[i] as usize]).collect();
            assert_eq!(lhs, act_sigma(&f, &comp).unwrap());
        }
    }

    #[test]
    fn act_sigma_commutes_with_compose_and_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..50 {
            let f = random_gate(&mut rng, 3, 2);
            let g = random_gate(&mut rng, 3, 2);
            let sigma = random_sigma(&mut rng, 3);
            assert_eq!(
                act_sigma(&f.compose(&g).unwrap(), &sigma).unwrap(),
                act_sigma(&f, &sigma).unwrap().compose(&act_sigma(&g, &sigma).unwrap()).unwrap()
            );
            let h = random_gate(&mut rng, 3, 1);
            assert_eq!(
                act_sigma(&f.tensor(&h).unwrap(), &sigma).unwrap(),
                act_sigma(&f, &sigma).unwrap().tensor(&act_sigma(&h, &sigma).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn act_sigma_respects_partition_conservativity() {
        use crate::analysis::{is_conservative_lambda, Partition};
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let split = Partition::split_last(3).unwrap();
        for _ in 0..60 {
            let f = random_gate(&mut rng, 3, 2);
            let sigma = random_sigma(&mut rng, 3);
            let mapped = split.map_symbols(&sigma).unwrap();
            assert_eq!(
                is_conservative_lambda(&f, &split).unwrap(),
                is_conservative_lambda(&act_sigma(&f, &sigma).unwrap(), &mapped).unwrap()
            );
        }
    }

    #[test]
    fn base_change_examples() {
        let id = Gate::identity(3, 2).unwrap();
        assert!(base_change(&id).unwrap().is_identity());

        let flip = make_tau(&Word::new(2, vec![0]).unwrap(), &Word::new(2, vec![1]).unwrap()).unwrap();
        let lifted = base_change(&flip).unwrap();
        assert_eq!(lifted.k(), 3);
        assert_eq!(lifted.apply_word(&w(3, "1")).unwrap(), w(3, "2"));
        assert_eq!(lifted.apply_word(&w(3, "3")).unwrap(), w(3, "3"));
    }

    #[test]
    fn base_change_is_injective_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..200 {
            let f = random_gate(&mut rng, 3, 2);
            let g = random_gate(&mut rng, 3, 2);
            if f != g {
                assert_ne!(base_change(&f).unwrap(), base_change(&g).unwrap());
            }
        }
    }

    #[test]
    fn base_change_respects_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..50 {
            let f = random_gate(&mut rng, 3, 2);
            let g = random_gate(&mut rng, 3, 2);
            assert_eq!(
                base_change(&f.compose(&g).unwrap()).unwrap(),
                base_change(&f).unwrap().compose(&base_change(&g).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn base_change_tensor_interaction() {
        // P(F (x) G) fixes mixed words while PF (x) PG still acts blockwise,
        // so they agree exactly on old-symbol words and nowhere else in
        // general. Guarded form: P(F (x) G) equals PF (x) PG wherever no
        // coordinate holds the new symbol.
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let f = random_gate(&mut rng, 2, 1);
        let g = random_gate(&mut rng, 2, 1);
        let lhs = base_change(&f.tensor(&g).unwrap()).unwrap();
        let rhs = base_change(&f).unwrap().tensor(&base_change(&g).unwrap()).unwrap();
        for (i, o) in lhs.entries() {
            let input = Word::from_index(3, 2, i).unwrap();
            if input.symbols().iter().all(|&s| s < 2) {
                assert_eq!(o, rhs.apply_index(i));
            } else {
                assert_eq!(o, i, "lifted tensor must fix {input}");
            }
        }
    }

    #[test]
    fn lift_circuit_transfers_extraction() {
        // the two-control conjugation circuit (k=3) lifts to k=4
        let source = crate::synth::two_control_tau_circuit(3, 0, 1, 2, 0).unwrap();
        let gate = source.extract_gate().unwrap();
        let lifted = lift_circuit(&source).unwrap();
        assert_eq!(lifted.extract_gate().unwrap(), base_change(&gate).unwrap());

        // Fredkin over the binary alphabet lifts to k=3
        let swap = make_swap(&Word::new(2, vec![0]).unwrap(), &Word::new(2, vec![1]).unwrap()).unwrap();
        let fredkin = make_controlled(&Word::new(2, vec![1]).unwrap(), &swap).unwrap();
        let mut b = CircuitBuilder::new(2, 3);
        b.gate(fredkin.clone().shared(), vec![0, 1, 2]);
        let c = b.build().unwrap();
        let lifted = lift_circuit(&c).unwrap();
        assert_eq!(lifted.extract_gate().unwrap(), base_change(&fredkin).unwrap());

        // empty circuit
        let empty = CircuitBuilder::new(2, 2).build().unwrap();
        let lifted = lift_circuit(&empty).unwrap();
        assert!(lifted.extract_gate().unwrap().is_identity());
        assert_eq!(lifted.k(), 3);
    }

    #[test]
    fn lift_circuit_on_partial_width_placements() {
        // A placement that leaves a wire untouched is the interesting case:
        // the lifted step must freeze when the untouched wire holds the new
        // symbol.
        let flip = make_tau(&Word::new(2, vec![0]).unwrap(), &Word::new(2, vec![1]).unwrap()).unwrap();
        let mut b = CircuitBuilder::new(2, 2);
        b.gate(flip.clone().shared(), vec![0]);
        let c = b.build().unwrap();
        let lifted = lift_circuit(&c).unwrap();
        let expect = base_change(&flip.tensor(&Gate::identity(2, 1).unwrap()).unwrap()).unwrap();
        assert_eq!(lifted.extract_gate().unwrap(), expect);
    }

    #[test]
    fn nonfingen_small_cases() {
        let report = nonfingen_certificate(1, 3).unwrap();
        assert_eq!(report.designated_wires, 2);
        assert_eq!(report.designated_inputs, 4);
        assert!(report.even_counts.iter().all(|c| c.flip_count % 2 == 0));
        assert_eq!(report.extremal.flip_count, 1);
        assert_eq!(report.conclusion, Conclusion::UnreachableParity);

        let report = nonfingen_certificate(3, 3).unwrap();
        assert!(report.even_counts.iter().all(|c| c.flip_count % 2 == 0));
        assert_eq!(report.extremal.flip_count, 1);

        assert!(nonfingen_certificate(1, 2).is_err());
    }

    #[test]
    fn parity_is_closed_under_composition() {
        // Symmetric differences of even flip sets stay even: compose random
        // sequences of placements and re-count.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let n = 3u32;
        let wires = n as usize + 1;
        let inputs: u64 = 1 << wires;
        for _ in 0..20 {
            // random sequence of (gate index, control subset)
            let mut seq = Vec::new();
            for _ in 0..rng.gen_range(1..6) {
                let i = rng.gen_range(0..=n);
                let mut controls: Vec<usize> = (0..wires).collect();
                controls.shuffle(&mut rng);
                controls.truncate(rng.gen_range(0..=i.min(wires as u32)) as usize);
                controls.sort_unstable();
                seq.push((i, controls));
            }
            let mut flips = 0u64;
            for r in 0..inputs {
                let controls_all_one = |wires_used: &[usize]| {
                    wires_used.iter().all(|&wire| (r >> wire) & 1 == 1)
                };
                let mut b = 1u32; // symbol 2
                for (_, controls) in &seq {
                    if controls_all_one(controls) {
                        b = if b == 1 { 2 } else { 1 };
                    }
                }
                if b != 1 {
                    flips += 1;
                }
            }
            assert_eq!(flips % 2, 0);
        }
    }
}

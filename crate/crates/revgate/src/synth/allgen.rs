//! Lowering machinery over the unrestricted library: controlled single-wire
//! transpositions with arbitrary control words, and the full synthesizer.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::circuit::{Circuit, CircuitBuilder};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::synth::decompose::{decompose_to_transpositions, differ_one_position};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Prefix1(u32),
    First1(u32, u32),
    Ctrl1(u32, u32, u32),
    Ctrl2(u32, u32, u32, u32),
    Ladder(Vec<u32>, u32, u32),
}

pub(crate) struct AllToolkit {
    k: u32,
    taus: HashMap<(u32, u32), Arc<Gate>>,
    tau_pair: Arc<Gate>,
    cache: RefCell<HashMap<Key, Arc<Circuit>>>,
}

impl AllToolkit {
    pub fn new(k: u32) -> Result<Self> {
        if k < 3 {
            return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
        }
        let mut taus = HashMap::new();
        for a in 0..k {
            for b in a + 1..k {
                let gate = crate::constructors::make_tau(
                    &Word::new(k, vec![a])?,
                    &Word::new(k, vec![b])?,
                )?;
                taus.insert((a, b), gate.shared());
            }
        }
        let tau_pair = crate::constructors::make_tau(
            &Word::new(k, vec![0, 0])?,
            &Word::new(k, vec![0, 1])?,
        )?
        .shared();
        Ok(AllToolkit { k, taus, tau_pair, cache: RefCell::new(HashMap::new()) })
    }

    fn tau1(&self, a: u32, b: u32) -> Arc<Gate> {
        Arc::clone(&self.taus[&(a.min(b), a.max(b))])
    }

    fn cached(&self, key: Key, make: impl FnOnce() -> Result<Circuit>) -> Result<Arc<Circuit>> {
        if let Some(c) = self.cache.borrow().get(&key) {
            return Ok(Arc::clone(c));
        }
        let circuit = make()?.shared();
        self.cache.borrow_mut().insert(key, Arc::clone(&circuit));
        Ok(circuit)
    }

    /// `tau_{11,1c}` on two wires: conjugate the pair generator's target.
    fn prefix1(&self, c: u32) -> Result<Arc<Circuit>> {
        self.cached(Key::Prefix1(c), || {
            let mut b = CircuitBuilder::new(self.k, 2);
            if c == 1 {
                b.gate(Arc::clone(&self.tau_pair), vec![0, 1]);
            } else if c != 0 {
                b.gate(self.tau1(1, c), vec![1]);
                b.gate(Arc::clone(&self.tau_pair), vec![0, 1]);
                b.gate(self.tau1(1, c), vec![1]);
            }
            b.build()
        })
    }

    /// `tau_{1b,1c}` on two wires.
    fn first1(&self, bsym: u32, c: u32) -> Result<Arc<Circuit>> {
        let (bsym, c) = (bsym.min(c), bsym.max(c));
        self.cached(Key::First1(bsym, c), || {
            if bsym == c {
                return CircuitBuilder::new(self.k, 2).build();
            }
            if bsym == 0 {
                return Ok((*self.prefix1(c)?).clone());
            }
            let mut b = CircuitBuilder::new(self.k, 2);
            b.gate(self.tau1(0, bsym), vec![1]);
            b.sub(self.prefix1(c)?, vec![0, 1]);
            b.gate(self.tau1(0, bsym), vec![1]);
            b.build()
        })
    }

    /// `tau_{ab,ac}` on two wires: one control symbol.
    fn ctrl1(&self, a: u32, bsym: u32, c: u32) -> Result<Arc<Circuit>> {
        let (bsym, c) = (bsym.min(c), bsym.max(c));
        self.cached(Key::Ctrl1(a, bsym, c), || {
            if bsym == c {
                return CircuitBuilder::new(self.k, 2).build();
            }
            if a == 0 {
                return Ok((*self.first1(bsym, c)?).clone());
            }
            let mut b = CircuitBuilder::new(self.k, 2);
            b.gate(self.tau1(0, a), vec![0]);
            b.sub(self.first1(bsym, c)?, vec![0, 1]);
            b.gate(self.tau1(0, a), vec![0]);
            b.build()
        })
    }

    /// `tau_{abc,abd}` on three wires: two control symbols routed through an
    /// ancilla that climbs 1 -> 2 -> 3 as the controls match.
    fn ctrl2(&self, a: u32, bsym: u32, c: u32, d: u32) -> Result<Arc<Circuit>> {
        let (c, d) = (c.min(d), c.max(d));
        self.cached(Key::Ctrl2(a, bsym, c, d), || {
            if c == d {
                return CircuitBuilder::new(self.k, 3).build();
            }
            let mut b = CircuitBuilder::new(self.k, 3);
            let w = b.ancilla(0);
            b.sub(self.ctrl1(a, 0, 1)?, vec![0, w]);
            b.sub(self.ctrl1(bsym, 1, 2)?, vec![1, w]);
            b.sub(self.ctrl1(2, c, d)?, vec![w, 2]);
            b.sub(self.ctrl1(bsym, 1, 2)?, vec![1, w]);
            b.sub(self.ctrl1(a, 0, 1)?, vec![0, w]);
            b.build()
        })
    }

    /// `w-tau_{a,b}` on `|w| + 1` wires, controls first, target last.
    pub fn controlled_tau(&self, w: &[u32], a: u32, b: u32) -> Result<Arc<Circuit>> {
        let (a, b) = (a.min(b), a.max(b));
        match w.len() {
            0 => self.cached(Key::Ladder(Vec::new(), a, b), || {
                let mut builder = CircuitBuilder::new(self.k, 1);
                if a != b {
                    builder.gate(self.tau1(a, b), vec![0]);
                }
                builder.build()
            }),
            1 => Ok(Arc::clone(&self.ctrl1(w[0], a, b)?)),
            2 => Ok(Arc::clone(&self.ctrl2(w[0], w[1], a, b)?)),
            n => self.cached(Key::Ladder(w.to_vec(), a, b), || {
                if a == b {
                    return CircuitBuilder::new(self.k, n + 1).build();
                }
                // Token ladder: n - 1 ancillas at 1; the first rung consumes
                // two controls, later rungs one control and the previous token.
                let mut builder = CircuitBuilder::new(self.k, n + 1);
                let tokens: Vec<usize> = (0..n - 1).map(|_| builder.ancilla(0)).collect();
                builder.sub(self.ctrl2(w[0], w[1], 0, 1)?, vec![0, 1, tokens[0]]);
                for i in 3..=n {
                    builder.sub(
                        self.ctrl2(w[i - 1], 1, 0, 1)?,
                        vec![i - 1, tokens[i - 3], tokens[i - 2]],
                    );
                }
                builder.sub(self.ctrl1(1, a, b)?, vec![tokens[n - 2], n]);
                for i in (3..=n).rev() {
                    builder.sub(
                        self.ctrl2(w[i - 1], 1, 0, 1)?,
                        vec![i - 1, tokens[i - 3], tokens[i - 2]],
                    );
                }
                builder.sub(self.ctrl2(w[0], w[1], 0, 1)?, vec![0, 1, tokens[0]]);
                builder.build()
            }),
        }
    }
}

/// The three-wire conjugation circuit for a transposition with a two-symbol
/// control word, exposed for reuse in transfer tests.
pub fn two_control_tau_circuit(k: u32, a: u32, b: u32, c: u32, d: u32) -> Result<Circuit> {
    let toolkit = AllToolkit::new(k)?;
    Ok((*toolkit.ctrl2(a, b, c, d)?).clone())
}

/// Controlled single-wire transposition over the unrestricted library,
/// controls first, target last.
pub fn synth_controlled_tau(w: &Word, a: u32, b: u32) -> Result<Circuit> {
    let toolkit = AllToolkit::new(w.k())?;
    Ok((*toolkit.controlled_tau(w.symbols(), a, b)?).clone())
}

/// Synthesize an arbitrary gate over the unrestricted library: split into
/// transpositions of words differing in one position, then lower each as a
/// wire-permuted controlled transposition.
pub fn synth_all(gate: &Gate) -> Result<Circuit> {
    let k = gate.k();
    let toolkit = AllToolkit::new(k)?;
    let pairs = decompose_to_transpositions(gate, differ_one_position)?;
    let n = gate.arity();
    let mut builder = CircuitBuilder::new(k, n);
    for (u, v) in pairs {
        let p = u
            .symbols()
            .iter()
            .zip(v.symbols())
            .position(|(x, y)| x != y)
            .expect("pair differs in one position");
        let ctrl: Vec<u32> = u
            .symbols()
            .iter()
            .enumerate()
            .filter(|&(pos, _)| pos != p)
            .map(|(_, &s)| s)
            .collect();
        let sub = toolkit.controlled_tau(&ctrl, u.symbols()[p], v.symbols()[p])?;
        let mut wires: Vec<usize> = (0..n).filter(|&pos| pos != p).collect();
        wires.push(p);
        builder.sub(sub, wires);
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{make_controlled, make_tau};
    use crate::synth::GeneratorLibrary;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn w3(s: &str) -> Word {
        Word::parse(3, s).unwrap()
    }

    fn ctrl_tau_gate(w: &Word, a: u32, b: u32) -> Gate {
        let k = w.k();
        let tau = make_tau(&Word::new(k, vec![a]).unwrap(), &Word::new(k, vec![b]).unwrap()).unwrap();
        make_controlled(w, &tau).unwrap()
    }

    #[test]
    fn prefix_conjugation_matches_target() {
        // conjugating tau_{11,12} by tau_{2,3} on the second wire gives tau_{11,13}
        let toolkit = AllToolkit::new(3).unwrap();
        let circuit = toolkit.prefix1(2).unwrap();
        assert_eq!(
            circuit.extract_gate().unwrap(),
            make_tau(&w3("11"), &w3("13")).unwrap()
        );
        assert_ne!(
            circuit.extract_gate().unwrap(),
            make_tau(&w3("11"), &w3("12")).unwrap()
        );
    }

    #[test]
    fn two_control_conjugation_exhaustive() {
        // every tau_{abc,abd} over three symbols, ancilla restored on all inputs
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let circuit = two_control_tau_circuit(3, a, b, c, d).unwrap();
                        let mut word = vec![a, b, c];
                        let u = Word::new(3, word.clone()).unwrap();
                        word[2] = d;
                        let v = Word::new(3, word).unwrap();
                        assert_eq!(
                            circuit.extract_gate().unwrap(),
                            make_tau(&u, &v).unwrap(),
                            "abc={a}{b}{c} d={d}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn empty_and_short_controls() {
        let c = synth_controlled_tau(&Word::empty(3).unwrap(), 1, 2).unwrap();
        assert_eq!(c.steps().len(), 1);
        assert_eq!(c.extract_gate().unwrap(), ctrl_tau_gate(&Word::empty(3).unwrap(), 1, 2));

        let c = synth_controlled_tau(&w3("2"), 0, 2).unwrap();
        assert_eq!(c.extract_gate().unwrap(), ctrl_tau_gate(&w3("2"), 0, 2));
    }

    #[test]
    fn ladder_is_exact_for_every_length_three_control() {
        let lib = GeneratorLibrary::all_gen(3).unwrap();
        for wi in 0..27 {
            let w = Word::from_index(3, 3, wi).unwrap();
            let c = synth_controlled_tau(&w, 0, 1).unwrap();
            assert_eq!(c.extract_gate().unwrap(), ctrl_tau_gate(&w, 0, 1), "w={w}");
            assert!(lib.certifies(&c));
            // the ladder level declares exactly |w| - 1 ancillas, all at 1
            assert_eq!(c.ancillas().len(), 2);
            assert!(c.ancillas().iter().all(|&(_, s)| s == 0));
        }
    }

    #[test]
    fn ladder_survives_scratch_symbol_collisions() {
        // control words full of the ladder's internal symbols 2 and 3
        for text in ["223", "332", "2323", "123", "321"] {
            let w = w3(text);
            for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                let c = synth_controlled_tau(&w, a, b).unwrap();
                assert_eq!(c.extract_gate().unwrap(), ctrl_tau_gate(&w, a, b), "w={text}");
            }
        }
    }

    #[test]
    fn four_wire_controlled_tau() {
        let w = w3("123");
        let c = synth_controlled_tau(&w, 0, 1).unwrap();
        assert_eq!(c.extract_gate().unwrap(), ctrl_tau_gate(&w, 0, 1));
        assert_eq!(c.ancillas().len(), 2);
    }

    #[test]
    fn synth_all_identity_and_generator() {
        let id = Gate::identity(3, 2).unwrap();
        let c = synth_all(&id).unwrap();
        assert!(c.steps().is_empty());
        assert!(c.extract_gate().unwrap().is_identity());

        let tau = make_tau(&w3("11"), &w3("12")).unwrap();
        let c = synth_all(&tau).unwrap();
        assert_eq!(c.extract_gate().unwrap(), tau);
    }

    #[test]
    fn synth_all_every_single_wire_gate() {
        let lib = GeneratorLibrary::all_gen(3).unwrap();
        let mut table: Vec<u32> = (0..3).collect();
        let mut count = 0;
        permute_all(&mut table, 0, &mut |t| {
            let g = Gate::new(3, 1, t.to_vec()).unwrap();
            let c = synth_all(&g).unwrap();
            assert_eq!(c.extract_gate().unwrap(), g);
            assert!(lib.certifies(&c));
            count += 1;
        });
        assert_eq!(count, 6);
    }

    fn permute_all(items: &mut [u32], start: usize, visit: &mut impl FnMut(&[u32])) {
        if start == items.len() {
            visit(items);
            return;
        }
        for i in start..items.len() {
            items.swap(start, i);
            permute_all(items, start + 1, visit);
            items.swap(start, i);
        }
    }

    #[test]
    fn synth_all_random_two_wire_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let lib = GeneratorLibrary::all_gen(3).unwrap();
        for _ in 0..40 {
            let mut table: Vec<u32> = (0..9).collect();
            table.shuffle(&mut rng);
            let g = Gate::new(3, 2, table).unwrap();
            let c = synth_all(&g).unwrap();
            assert_eq!(c.extract_gate().unwrap(), g);
            assert!(lib.certifies(&c));
        }
    }

    #[test]
    fn synth_all_three_wire_transposition() {
        let u = w3("123");
        let v = w3("321");
        let tau = make_tau(&u, &v).unwrap();
        let c = synth_all(&tau).unwrap();
        assert_eq!(c.extract_gate().unwrap(), tau);
    }

    #[test]
    fn rejects_binary_alphabet() {
        let g = Gate::identity(2, 1).unwrap();
        assert!(matches!(synth_all(&g), Err(Error::AlphabetBelowMinimum { .. })));
    }
}

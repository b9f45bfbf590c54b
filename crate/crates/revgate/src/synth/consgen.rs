//! Lowering machinery for conservative targets: controlled swaps with
//! arbitrary control symbols and words, built from the `1-SWAP` generators,
//! and the conservative synthesizer itself.
//!
//! Everything here is parameterized over the source of `1-SWAP_{a,b}`
//! circuits, so the partition-conservative toolkit reuses the same ladders
//! with its own derived swaps.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use crate::analysis;
use crate::circuit::{Circuit, CircuitBuilder};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::synth::decompose::{decompose_to_transpositions, same_multiset};
use crate::synth::one_swap_gate;
use crate::word::Word;

/// Supplier of three-input circuits implementing `1-SWAP_{a,b}`.
pub(crate) trait OneSwapSource {
    fn k(&self) -> u32;
    fn one_swap_circuit(&self, a: u32, b: u32) -> Result<Arc<Circuit>>;
}

/// The plain conservative library: every `1-SWAP_{a,b}` is a generator.
pub(crate) struct ConsSource {
    k: u32,
    gates: RefCell<HashMap<(u32, u32), Arc<Circuit>>>,
}

impl ConsSource {
    pub fn new(k: u32) -> Result<Self> {
        if k < 3 {
            return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
        }
        Ok(ConsSource { k, gates: RefCell::new(HashMap::new()) })
    }
}

impl OneSwapSource for ConsSource {
    fn k(&self) -> u32 {
        self.k
    }

    fn one_swap_circuit(&self, a: u32, b: u32) -> Result<Arc<Circuit>> {
        let key = (a.min(b), a.max(b));
        if let Some(c) = self.gates.borrow().get(&key) {
            return Ok(Arc::clone(c));
        }
        let mut builder = CircuitBuilder::new(self.k, 3);
        if a != b {
            builder.gate(one_swap_gate(self.k, key.0, key.1)?.shared(), vec![0, 1, 2]);
        }
        let circuit = builder.build()?.shared();
        self.gates.borrow_mut().insert(key, Arc::clone(&circuit));
        Ok(circuit)
    }
}

/// Caching lowering layer from `1-SWAP` circuits to controlled swaps over
/// arbitrary control words, and to conservative transpositions.
type CircuitCache<K> = RefCell<HashMap<K, Arc<Circuit>>>;

pub(crate) struct SwapLower {
    source: Rc<dyn OneSwapSource>,
    xchg: CircuitCache<(u32, u32)>,
    cswap: CircuitCache<(u32, u32, u32)>,
    wswap: CircuitCache<(Vec<u32>, u32, u32)>,
}

impl SwapLower {
    pub fn new(source: Rc<dyn OneSwapSource>) -> Self {
        SwapLower {
            source,
            xchg: RefCell::new(HashMap::new()),
            cswap: RefCell::new(HashMap::new()),
            wswap: RefCell::new(HashMap::new()),
        }
    }

    pub fn k(&self) -> u32 {
        self.source.k()
    }

    pub fn one_swap(&self, a: u32, b: u32) -> Result<Arc<Circuit>> {
        self.source.one_swap_circuit(a, b)
    }

    /// Two-input circuit exchanging the symbol values `s` and `t` across the
    /// two wires: the controlled swap with its control pinned to an ancilla
    /// holding symbol 1.
    pub fn xchg(&self, s: u32, t: u32) -> Result<Arc<Circuit>> {
        let key = (s.min(t), s.max(t));
        if let Some(c) = self.xchg.borrow().get(&key) {
            return Ok(Arc::clone(c));
        }
        let mut builder = CircuitBuilder::new(self.k(), 2);
        if s != t {
            let one = builder.ancilla(0);
            builder.sub(self.one_swap(s, t)?, vec![one, 0, 1]);
        }
        let circuit = builder.build()?.shared();
        self.xchg.borrow_mut().insert(key, Arc::clone(&circuit));
        Ok(circuit)
    }

    /// `c-SWAP_{a,b}`: three inputs, swapping the last two wires between `a`
    /// and `b` when the first holds `c`. For `c != 1` the control is routed
    /// through two exchange ancillas so the library's 1-controlled swap can
    /// fire: the control value 1 is first parked on a spare symbol `d`, then
    /// `c` is brought to 1.
    pub fn c_swap(&self, c: u32, a: u32, b: u32) -> Result<Arc<Circuit>> {
        let key = (c, a.min(b), a.max(b));
        if let Some(circ) = self.cswap.borrow().get(&key) {
            return Ok(Arc::clone(circ));
        }
        let k = self.k();
        let mut builder = CircuitBuilder::new(k, 3);
        if a != b {
            if c == 0 {
                builder.sub(self.one_swap(a, b)?, vec![0, 1, 2]);
            } else {
                let d = (0..k).find(|&s| s != 0 && s != c).expect("k >= 3");
                let park = builder.ancilla(d);
                let bring = builder.ancilla(0);
                builder.sub(self.xchg(0, d)?, vec![park, 0]);
                builder.sub(self.xchg(0, c)?, vec![bring, 0]);
                builder.sub(self.one_swap(a, b)?, vec![0, 1, 2]);
                builder.sub(self.xchg(0, c)?, vec![bring, 0]);
                builder.sub(self.xchg(0, d)?, vec![park, 0]);
            }
        }
        let circuit = builder.build()?.shared();
        self.cswap.borrow_mut().insert(key, Arc::clone(&circuit));
        Ok(circuit)
    }

    /// `w-SWAP_{a,b}` on `|w| + 2` inputs: the controls feed a token ladder
    /// whose ancillas start at `1, 2, 2, ...`; the token reaches the far end
    /// exactly when every control matches, enabling the final swap.
    pub fn w_swap(&self, w: &[u32], a: u32, b: u32) -> Result<Arc<Circuit>> {
        let key = (w.to_vec(), a.min(b), a.max(b));
        if let Some(circ) = self.wswap.borrow().get(&key) {
            return Ok(Arc::clone(circ));
        }
        let k = self.k();
        let n = w.len();
        let circuit = if a == b {
            CircuitBuilder::new(k, n + 2).build()?.shared()
        } else if n == 0 {
            let mut builder = CircuitBuilder::new(k, 2);
            let one = builder.ancilla(0);
            builder.sub(self.one_swap(a, b)?, vec![one, 0, 1]);
            builder.build()?.shared()
        } else if n == 1 {
            self.c_swap(w[0], a, b)?
        } else {
            let mut builder = CircuitBuilder::new(k, n + 2);
            let mut tokens = vec![builder.ancilla(0)];
            for _ in 0..n {
                tokens.push(builder.ancilla(1));
            }
            for i in 0..n {
                builder.sub(self.c_swap(w[i], 0, 1)?, vec![i, tokens[i], tokens[i + 1]]);
            }
            builder.sub(self.one_swap(a, b)?, vec![tokens[n], n, n + 1]);
            for i in (0..n).rev() {
                builder.sub(self.c_swap(w[i], 0, 1)?, vec![i, tokens[i], tokens[i + 1]]);
            }
            builder.build()?.shared()
        };
        self.wswap.borrow_mut().insert(key, Arc::clone(&circuit));
        Ok(circuit)
    }

    /// Transposition of two words that are position-permutations of each
    /// other, lowered through adjacent-position controlled swaps: bubble the
    /// symbols of `u` into `v` and fold the exchange path into a palindrome.
    pub fn cons_transposition(&self, u: &[u32], v: &[u32]) -> Result<Arc<Circuit>> {
        let n = u.len();
        debug_assert_eq!(v.len(), n);
        let mut builder = CircuitBuilder::new(self.k(), n);
        // Elementary steps: (word before the exchange, position swapped with
        // its right neighbor).
        let mut steps: Vec<(Vec<u32>, usize)> = Vec::new();
        let mut current = u.to_vec();
        for i in 0..n {
            if current[i] == v[i] {
                continue;
            }
            let j = (i + 1..n)
                .find(|&j| current[j] == v[i])
                .expect("equal multisets");
            for p in (i..j).rev() {
                steps.push((current.clone(), p));
                current.swap(p, p + 1);
            }
        }
        debug_assert_eq!(current, v);
        if !steps.is_empty() {
            let mut order: Vec<usize> = (1..steps.len()).rev().collect();
            order.push(0);
            order.extend(1..steps.len());
            for idx in order {
                let (before, p) = &steps[idx];
                self.place_exchange(&mut builder, before, *p)?;
            }
        }
        Ok(builder.build()?.shared())
    }

    /// Place the transposition exchanging positions `p` and `p+1` of `before`
    /// (a single controlled swap with the remaining positions as controls).
    fn place_exchange(&self, builder: &mut CircuitBuilder, before: &[u32], p: usize) -> Result<()> {
        let n = before.len();
        let mut ctrl_word = Vec::with_capacity(n - 2);
        let mut ctrl_wires = Vec::with_capacity(n - 2);
        for (pos, &sym) in before.iter().enumerate() {
            if pos != p && pos != p + 1 {
                ctrl_word.push(sym);
                ctrl_wires.push(pos);
            }
        }
        let sub = self.w_swap(&ctrl_word, before[p], before[p + 1])?;
        let mut wires = ctrl_wires;
        wires.push(p);
        wires.push(p + 1);
        builder.sub(sub, wires);
        Ok(())
    }
}

/// Controlled swap over the conservative library, using the standard
/// ancilla recipes: the single-control case routes the control through
/// spare symbols, longer controls use the token ladder.
pub fn synth_controlled_swap(w: &Word, a: u32, b: u32) -> Result<Circuit> {
    let k = w.k();
    let source = Rc::new(ConsSource::new(k)?);
    let lower = SwapLower::new(source);
    let circuit = lower.w_swap(w.symbols(), a, b)?;
    Ok((*circuit).clone())
}

/// Synthesize a conservative gate over the `1-SWAP` library. Rejects gates
/// that change any symbol count, naming a witness input.
pub fn synth_cons(gate: &Gate) -> Result<Circuit> {
    let k = gate.k();
    if k < 3 {
        return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
    }
    let singles = analysis::Partition::singletons(k)?;
    if let Some(witness) = analysis::lambda_violation(gate, &singles)? {
        return Err(Error::NotConservative { witness });
    }
    let source = Rc::new(ConsSource::new(k)?);
    let lower = SwapLower::new(source);
    let pairs = decompose_to_transpositions(gate, same_multiset)?;
    let n = gate.arity();
    let mut builder = CircuitBuilder::new(k, n);
    for (u, v) in pairs {
        let sub = lower.cons_transposition(u.symbols(), v.symbols())?;
        builder.sub(sub, (0..n).collect());
    }
    builder.build()
}

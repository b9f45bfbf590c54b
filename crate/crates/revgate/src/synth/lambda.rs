//! Lowering machinery over the partition-conservative library.
//!
//! The library provides within-block single-wire transpositions, one
//! controlled transposition per multi-symbol block, and one controlled swap
//! per block pair. Everything else is derived:
//!
//! - controlled transpositions with arbitrary control words run a token
//!   cascade: each control wire, conjugated within its block (and routed
//!   through exchange ancillas when its block does not contain symbol 1),
//!   passes an "active" token one step along a chain of ancillas, and the
//!   pair generator fires off the final token;
//! - within-block controlled swaps are conjugation chains of three such
//!   controlled transpositions;
//! - cross-block swaps conjugate the library's representative pair;
//! - arbitrary controlled swaps and conservative rearrangements then reuse
//!   the generic ladder machinery with these swaps as its source.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use crate::analysis::{self, Partition};
use crate::circuit::{Circuit, CircuitBuilder};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::synth::consgen::{OneSwapSource, SwapLower};
use crate::synth::decompose::decompose_to_transpositions;
use crate::word::Word;

type CircuitCache<K> = RefCell<HashMap<K, Arc<Circuit>>>;

pub(crate) struct LambdaInner {
    k: u32,
    partition: Partition,
    /// Within-block single-wire transpositions, keyed by sorted pair.
    taus: HashMap<(u32, u32), Arc<Gate>>,
    /// Per-block controlled transposition on the two smallest symbols.
    pair_gates: HashMap<usize, Arc<Gate>>,
    /// Cross-block controlled swaps on block representatives, sorted pair.
    cross_swaps: HashMap<(u32, u32), Arc<Gate>>,
    one_swap_cache: CircuitCache<(u32, u32)>,
    ctrl_tau_cache: CircuitCache<(Vec<u32>, u32, u32)>,
    xchg_cache: CircuitCache<u32>,
}

impl LambdaInner {
    pub fn new(partition: &Partition) -> Result<Self> {
        let k = partition.k();
        if k < 3 {
            return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
        }
        let mut taus = HashMap::new();
        let mut pair_gates = HashMap::new();
        let mut cross_swaps = HashMap::new();
        for (t, block) in partition.blocks().iter().enumerate() {
            for (i, &a) in block.iter().enumerate() {
                for &b in &block[i + 1..] {
                    let gate = crate::constructors::make_tau(
                        &Word::new(k, vec![a])?,
                        &Word::new(k, vec![b])?,
                    )?;
                    taus.insert((a, b), gate.shared());
                }
            }
            if block.len() > 1 {
                let (a, b) = (block[0], block[1]);
                let gate = crate::constructors::make_tau(
                    &Word::new(k, vec![a, a])?,
                    &Word::new(k, vec![a, b])?,
                )?;
                pair_gates.insert(t, gate.shared());
            }
        }
        for (i, bi) in partition.blocks().iter().enumerate() {
            for bj in &partition.blocks()[i + 1..] {
                let (a, b) = (bi[0], bj[0]);
                let gate = crate::synth::one_swap_gate(k, a, b)?;
                cross_swaps.insert((a.min(b), a.max(b)), gate.shared());
            }
        }
        Ok(LambdaInner {
            k,
            partition: partition.clone(),
            taus,
            pair_gates,
            cross_swaps,
            one_swap_cache: RefCell::new(HashMap::new()),
            ctrl_tau_cache: RefCell::new(HashMap::new()),
            xchg_cache: RefCell::new(HashMap::new()),
        })
    }

    fn tau1(&self, a: u32, b: u32) -> Arc<Gate> {
        Arc::clone(&self.taus[&(a.min(b), a.max(b))])
    }

    fn rep(&self, block: usize) -> u32 {
        self.partition.blocks()[block][0]
    }

    /// Two-input circuit exchanging symbols 1 and `s` across the wires.
    fn xchg(&self, s: u32) -> Result<Arc<Circuit>> {
        debug_assert_ne!(s, 0);
        if let Some(c) = self.xchg_cache.borrow().get(&s) {
            return Ok(Arc::clone(c));
        }
        let mut b = CircuitBuilder::new(self.k, 2);
        let one = b.ancilla(0);
        b.sub(self.one_swap_circuit(0, s)?, vec![one, 0, 1]);
        let circuit = b.build()?.shared();
        self.xchg_cache.borrow_mut().insert(s, Arc::clone(&circuit));
        Ok(circuit)
    }

    /// Controlled within-block transposition `w-tau_{p,q}` on `|w| + 1`
    /// wires, controls first, target last.
    pub fn ctrl_tau(&self, w: &[u32], p: u32, q: u32) -> Result<Arc<Circuit>> {
        let (p, q) = (p.min(q), p.max(q));
        let key = (w.to_vec(), p, q);
        if let Some(c) = self.ctrl_tau_cache.borrow().get(&key) {
            return Ok(Arc::clone(c));
        }
        let circuit = self.build_ctrl_tau(w, p, q)?.shared();
        self.ctrl_tau_cache.borrow_mut().insert(key, Arc::clone(&circuit));
        Ok(circuit)
    }

    fn build_ctrl_tau(&self, w: &[u32], p: u32, q: u32) -> Result<Circuit> {
        let n = w.len();
        let mut builder = CircuitBuilder::new(self.k, n + 1);
        if p == q {
            return builder.build();
        }
        let t = self.partition.block_of(p);
        debug_assert_eq!(t, self.partition.block_of(q), "target pair must share a block");
        if n == 0 {
            builder.gate(self.tau1(p, q), vec![0]);
            return builder.build();
        }
        let (act, inact) = if t == 0 {
            (0, self.rep(1))
        } else {
            (self.rep(t), 0)
        };

        // Per-control preparation: a within-block conjugation to the block
        // representative, then for blocks away from symbol 1 a two-exchange
        // routing that brings the representative to 1.
        struct Prep {
            conj: Option<Arc<Gate>>,
            translate: Option<(Arc<Circuit>, Arc<Circuit>, usize, usize)>,
        }
        let mut preps = Vec::with_capacity(n);
        for (i, &c) in w.iter().enumerate() {
            let s = self.partition.block_of(c);
            let r = self.rep(s);
            let conj = (c != r).then(|| self.tau1(r, c));
            let translate = if s == 0 {
                None
            } else {
                let d = (0..self.k).find(|&x| x != 0 && x != r).expect("k >= 3");
                let park = builder.ancilla(d);
                let bring = builder.ancilla(0);
                Some((self.xchg(d)?, self.xchg(r)?, park, bring))
            };
            preps.push((i, Prep { conj, translate }));
        }

        let mut tokens = vec![builder.ancilla(act)];
        for _ in 0..n {
            tokens.push(builder.ancilla(inact));
        }
        let cascade = self.one_swap_circuit(act, inact)?;

        for (i, prep) in &preps {
            if let Some(tau) = &prep.conj {
                builder.gate(Arc::clone(tau), vec![*i]);
            }
        }
        for (i, prep) in &preps {
            if let Some((park_x, bring_x, park, bring)) = &prep.translate {
                builder.sub(Arc::clone(park_x), vec![*park, *i]);
                builder.sub(Arc::clone(bring_x), vec![*bring, *i]);
            }
        }
        for i in 0..n {
            builder.sub(Arc::clone(&cascade), vec![i, tokens[i], tokens[i + 1]]);
        }

        // Fire the block's pair generator, conjugated to the target pair.
        let pair_gate = Arc::clone(
            self.pair_gates
                .get(&t)
                .expect("target pair lies in a block of size >= 2"),
        );
        let map = block_pair_map(self.rep(t), self.partition.blocks()[t][1], p, q);
        for &(x, y) in map.iter().rev() {
            builder.gate(self.tau1(x, y), vec![n]);
        }
        builder.gate(pair_gate, vec![tokens[n], n]);
        for &(x, y) in &map {
            builder.gate(self.tau1(x, y), vec![n]);
        }

        for i in (0..n).rev() {
            builder.sub(Arc::clone(&cascade), vec![i, tokens[i], tokens[i + 1]]);
        }
        for (i, prep) in preps.iter().rev() {
            if let Some((park_x, bring_x, park, bring)) = &prep.translate {
                builder.sub(Arc::clone(bring_x), vec![*bring, *i]);
                builder.sub(Arc::clone(park_x), vec![*park, *i]);
            }
        }
        for (i, prep) in preps.iter().rev() {
            if let Some(tau) = &prep.conj {
                builder.gate(Arc::clone(tau), vec![*i]);
            }
        }
        builder.build()
    }
}

/// Transpositions (applied in order) mapping `r` to `p` and `b0` to `q`,
/// all within one block.
fn block_pair_map(r: u32, b0: u32, p: u32, q: u32) -> Vec<(u32, u32)> {
    let mut taus = Vec::new();
    let mut cur_b = b0;
    if r != p {
        taus.push((r, p));
        if cur_b == p {
            cur_b = r;
        }
    }
    if cur_b != q {
        taus.push((cur_b, q));
    }
    taus
}

impl OneSwapSource for LambdaInner {
    fn k(&self) -> u32 {
        self.k
    }

    /// `1-SWAP_{a,b}` over the partition library. Cross-block pairs
    /// conjugate the representative generator; within-block pairs chain
    /// three controlled transpositions.
    fn one_swap_circuit(&self, a: u32, b: u32) -> Result<Arc<Circuit>> {
        let key = (a.min(b), a.max(b));
        if let Some(c) = self.one_swap_cache.borrow().get(&key) {
            return Ok(Arc::clone(c));
        }
        let (a, b) = key;
        let mut builder = CircuitBuilder::new(self.k, 3);
        if a != b {
            let ba = self.partition.block_of(a);
            let bb = self.partition.block_of(b);
            if ba != bb {
                let (ra, rb) = (self.rep(ba), self.rep(bb));
                let base = Arc::clone(&self.cross_swaps[&(ra.min(rb), ra.max(rb))]);
                let mut conj: Vec<Arc<Gate>> = Vec::new();
                if a != ra {
                    conj.push(self.tau1(ra, a));
                }
                if b != rb {
                    conj.push(self.tau1(rb, b));
                }
                for tau in &conj {
                    builder.gate(Arc::clone(tau), vec![1]);
                    builder.gate(Arc::clone(tau), vec![2]);
                }
                builder.gate(base, vec![0, 1, 2]);
                for tau in conj.iter().rev() {
                    builder.gate(Arc::clone(tau), vec![2]);
                    builder.gate(Arc::clone(tau), vec![1]);
                }
            } else {
                // tau_{1ab,1ba} as a conjugation chain: the middle-position
                // move sandwiched by the last-position move.
                let core = self.ctrl_tau(&[0, a], a, b)?;
                builder.sub(Arc::clone(&core), vec![0, 2, 1]);
                builder.sub(Arc::clone(&core), vec![0, 1, 2]);
                builder.sub(core, vec![0, 2, 1]);
            }
        }
        let circuit = builder.build()?.shared();
        self.one_swap_cache.borrow_mut().insert(key, Arc::clone(&circuit));
        Ok(circuit)
    }
}

/// Shared handle: the derived-circuit caches plus the generic swap ladders
/// running over them.
pub(crate) struct LambdaCtx {
    pub inner: Rc<LambdaInner>,
    pub lower: SwapLower,
}

impl LambdaCtx {
    pub fn new(partition: &Partition) -> Result<Self> {
        let inner = Rc::new(LambdaInner::new(partition)?);
        let lower = SwapLower::new(Rc::clone(&inner) as Rc<dyn OneSwapSource>);
        Ok(LambdaCtx { inner, lower })
    }

    pub fn k(&self) -> u32 {
        self.inner.k
    }

    pub fn partition(&self) -> &Partition {
        &self.inner.partition
    }

    /// Controlled within-block transposition: swap an
    /// ancilla pair `(a, b)` under the control word, fire the two-symbol
    /// generator against the moved ancilla, and swap back.
    pub fn wctrl_trans(&self, w: &[u32], a: u32, b: u32) -> Result<Arc<Circuit>> {
        let n = w.len();
        let mut builder = CircuitBuilder::new(self.k(), n + 1);
        if a == b {
            return Ok(builder.build()?.shared());
        }
        if n == 0 {
            builder.gate(self.inner.tau1(a, b), vec![0]);
            return Ok(builder.build()?.shared());
        }
        let z1 = builder.ancilla(a);
        let z2 = builder.ancilla(b);
        let swap = self.lower.w_swap(w, a, b)?;
        let mut wires: Vec<usize> = (0..n).collect();
        wires.push(z1);
        wires.push(z2);
        builder.sub(Arc::clone(&swap), wires.clone());
        builder.sub(self.inner.ctrl_tau(&[a], a, b)?, vec![z2, n]);
        builder.sub(swap, wires);
        Ok(builder.build()?.shared())
    }

    /// Transposition of two words with equal blockwise counts: rearrange one
    /// endpoint to match the other block-by-block (a conservative move), then
    /// walk the within-block differences.
    pub fn lambda_transposition(&self, u: &[u32], v: &[u32]) -> Result<Arc<Circuit>> {
        let n = u.len();
        debug_assert_eq!(v.len(), n);
        let mut builder = CircuitBuilder::new(self.k(), n);
        if u == v {
            return Ok(builder.build()?.shared());
        }
        // Blockwise alignment: a permutation of v whose every position sits
        // in the same block as u there.
        let mut remaining = v.to_vec();
        let mut aligned = Vec::with_capacity(n);
        for &us in u {
            let block = self.partition().block_of(us);
            let pos = remaining
                .iter()
                .enumerate()
                .filter(|&(_, &s)| self.partition().block_of(s) == block)
                .min_by_key(|&(_, &s)| s)
                .map(|(i, _)| i)
                .expect("equal blockwise counts");
            aligned.push(remaining.swap_remove(pos));
        }

        let all_wires: Vec<usize> = (0..n).collect();
        if aligned == u {
            // purely a position rearrangement
            builder.sub(self.lower.cons_transposition(u, v)?, all_wires);
        } else if aligned == v {
            builder.sub(self.within_block_transposition(u, v)?, all_wires);
        } else {
            let sigma = self.lower.cons_transposition(&aligned, v)?;
            builder.sub(Arc::clone(&sigma), all_wires.clone());
            builder.sub(self.within_block_transposition(u, &aligned)?, all_wires.clone());
            builder.sub(sigma, all_wires);
        }
        Ok(builder.build()?.shared())
    }

    /// Transposition of two words agreeing blockwise at every position,
    /// walked one position at a time and folded into a palindrome.
    fn within_block_transposition(&self, u: &[u32], v: &[u32]) -> Result<Arc<Circuit>> {
        let n = u.len();
        let mut builder = CircuitBuilder::new(self.k(), n);
        let mut path = vec![u.to_vec()];
        let mut current = u.to_vec();
        for pos in 0..n {
            if current[pos] != v[pos] {
                current[pos] = v[pos];
                path.push(current.clone());
            }
        }
        debug_assert_eq!(current, v);
        let m = path.len() - 1;
        if m > 0 {
            let mut order: Vec<usize> = (2..=m).rev().collect();
            order.push(1);
            order.extend(2..=m);
            for idx in order {
                let before = &path[idx - 1];
                let after = &path[idx];
                let pos = before
                    .iter()
                    .zip(after)
                    .position(|(x, y)| x != y)
                    .expect("consecutive path words differ");
                let ctrl: Vec<u32> = before
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != pos)
                    .map(|(_, &s)| s)
                    .collect();
                let sub = self.wctrl_trans(&ctrl, before[pos], after[pos])?;
                let mut wires: Vec<usize> = (0..n).filter(|&i| i != pos).collect();
                wires.push(pos);
                builder.sub(sub, wires);
            }
        }
        Ok(builder.build()?.shared())
    }
}

/// Synthesize a partition-conservative gate over the partition library.
/// The one-block partition reduces to the unrestricted synthesizer and the
/// all-singletons partition to the conservative one.
pub fn synth_cons_lambda(gate: &Gate, partition: &Partition) -> Result<Circuit> {
    let k = gate.k();
    if k < 3 {
        return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
    }
    if partition.k() != k {
        return Err(Error::AlphabetMismatch { left: k, right: partition.k() });
    }
    if let Some(witness) = analysis::lambda_violation(gate, partition)? {
        return Err(Error::NotLambdaConservative { witness });
    }
    if partition.is_whole() {
        return super::allgen::synth_all(gate);
    }
    if partition.is_singletons() {
        return super::consgen::synth_cons(gate);
    }
    let ctx = LambdaCtx::new(partition)?;
    let block_counts_equal = |u: &Word, v: &Word| {
        let mut cu = vec![0usize; partition.block_count()];
        let mut cv = vec![0usize; partition.block_count()];
        for &s in u.symbols() {
            cu[partition.block_of(s)] += 1;
        }
        for &s in v.symbols() {
            cv[partition.block_of(s)] += 1;
        }
        cu == cv
    };
    let pairs = decompose_to_transpositions(gate, block_counts_equal)?;
    let n = gate.arity();
    let mut builder = CircuitBuilder::new(k, n);
    for (u, v) in pairs {
        builder.sub(ctx.lambda_transposition(u.symbols(), v.symbols())?, (0..n).collect());
    }
    builder.build()
}

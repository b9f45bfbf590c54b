//! Synthesizers: lower a target gate to a circuit over one of the fixed
//! generator libraries, verifiable by extraction.
//!
//! Each synthesizer mirrors a constructive generation argument: targets are
//! split into transpositions whose endpoints are adjacent under a suitable
//! relation, and each adjacent transposition is lowered to controlled gates
//! built from the library by conjugation ladders. Output circuits place only
//! library gates, free wire permutations, and nested circuits of the same
//! shape.

mod allgen;
mod ccgen;
mod consgen;
mod decompose;
mod lambda;
mod modgen;
mod single;

pub use allgen::{synth_all, synth_controlled_tau, two_control_tau_circuit};
pub use ccgen::{find_tensor_witness, synth_cc_from_gate};
pub use consgen::{synth_cons, synth_controlled_swap};
pub use decompose::decompose_to_transpositions;
pub use lambda::synth_cons_lambda;
pub use modgen::synth_mod_preserving;
pub use single::combine_single_generator;

use std::sync::Arc;

use crate::analysis::Partition;
use crate::circuit::{Circuit, PlacedOp};
use crate::constructors::{make_cc, make_controlled, make_swap, make_tau};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::word::Word;

/// Which fixed generator set a library instance describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LibraryKind {
    /// Single-wire transpositions plus one two-wire transposition.
    All,
    /// Controlled symbol swaps `1-SWAP_{a,b}`.
    Cons,
    /// The partition-conservative generating set.
    Lambda(Partition),
    /// The split-last partition library together with `CC_m`.
    Mod(u32),
}

/// A named finite generating set over a fixed alphabet.
#[derive(Debug, Clone)]
pub struct GeneratorLibrary {
    k: u32,
    kind: LibraryKind,
    gates: Vec<(String, Arc<Gate>)>,
}

fn require_three_symbols(k: u32) -> Result<()> {
    if k < 3 {
        return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
    }
    Ok(())
}

impl GeneratorLibrary {
    /// Generators of the class of all gates: every single-wire transposition
    /// together with the two-wire transposition of `11` and `12`.
    pub fn all_gen(k: u32) -> Result<Self> {
        require_three_symbols(k)?;
        let mut gates = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                let u = Word::new(k, vec![a])?;
                let v = Word::new(k, vec![b])?;
                gates.push((format!("tau_{u}_{v}"), make_tau(&u, &v)?.shared()));
            }
        }
        let u = Word::new(k, vec![0, 0])?;
        let v = Word::new(k, vec![0, 1])?;
        gates.push((format!("tau_{u}_{v}"), make_tau(&u, &v)?.shared()));
        Ok(GeneratorLibrary { k, kind: LibraryKind::All, gates })
    }

    /// Generators of the conservative gates: `1-SWAP_{a,b}` for all pairs.
    pub fn cons_gen(k: u32) -> Result<Self> {
        require_three_symbols(k)?;
        let mut gates = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                gates.push((cswap_name(a, b), one_swap_gate(k, a, b)?.shared()));
            }
        }
        Ok(GeneratorLibrary { k, kind: LibraryKind::Cons, gates })
    }

    /// Generators of the partition-conservative gates: within-block
    /// single-wire transpositions, one controlled transposition per block of
    /// size at least two, and one cross-block controlled swap per block pair.
    pub fn lambda_gen(partition: &Partition) -> Result<Self> {
        let k = partition.k();
        require_three_symbols(k)?;
        let mut gates: Vec<(String, Arc<Gate>)> = Vec::new();
        let mut push = |name: String, gate: Gate| {
            if !gates.iter().any(|(_, g)| **g == gate) {
                gates.push((name, gate.shared()));
            }
        };
        for block in partition.blocks() {
            for (i, &a) in block.iter().enumerate() {
                for &b in &block[i + 1..] {
                    let u = Word::new(k, vec![a])?;
                    let v = Word::new(k, vec![b])?;
                    push(format!("tau_{u}_{v}"), make_tau(&u, &v)?);
                }
            }
        }
        for block in partition.blocks() {
            if block.len() > 1 {
                let (a, b) = (block[0], block[1]);
                let u = Word::new(k, vec![a, a])?;
                let v = Word::new(k, vec![a, b])?;
                push(format!("tau_{u}_{v}"), make_tau(&u, &v)?);
            }
        }
        for (i, bi) in partition.blocks().iter().enumerate() {
            for bj in &partition.blocks()[i + 1..] {
                let (a, b) = (bi[0], bj[0]);
                push(cswap_name(a, b), one_swap_gate(k, a, b)?);
            }
        }
        Ok(GeneratorLibrary { k, kind: LibraryKind::Lambda(partition.clone()), gates })
    }

    /// The split-last partition library together with `CC_m`.
    pub fn mod_gen(k: u32, m: u32) -> Result<Self> {
        let base = GeneratorLibrary::lambda_gen(&Partition::split_last(k)?)?;
        let mut gates = base.gates;
        gates.push((format!("cc_{m}"), make_cc(m, k)?.shared()));
        Ok(GeneratorLibrary { k, kind: LibraryKind::Mod(m), gates })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn kind(&self) -> &LibraryKind {
        &self.kind
    }

    pub fn gates(&self) -> &[(String, Arc<Gate>)] {
        &self.gates
    }

    /// Append an extra generator (used when a synthesis is relative to a
    /// library plus a seed gate).
    pub fn with_extra_gate(mut self, name: &str, gate: Arc<Gate>) -> Self {
        self.gates.push((name.to_string(), gate));
        self
    }

    pub fn contains(&self, gate: &Gate) -> bool {
        self.gates.iter().any(|(_, g)| **g == *gate)
    }

    pub fn find(&self, gate: &Gate) -> Option<Arc<Gate>> {
        self.gates.iter().find(|(_, g)| **g == *gate).map(|(_, g)| Arc::clone(g))
    }

    /// Library discipline: every placement is a library gate, a free wire
    /// permutation, or a nested circuit that recursively satisfies this.
    pub fn certifies(&self, circuit: &Circuit) -> bool {
        circuit.steps().iter().all(|p| match &p.op {
            PlacedOp::Gate(g) => self.contains(g) || g.wire_permutation().is_some(),
            PlacedOp::Circuit(c) => self.certifies(c),
        })
    }
}

fn cswap_name(a: u32, b: u32) -> String {
    format!("cswap_{}_{}", a + 1, b + 1)
}

/// The three-wire gate `1-SWAP_{a,b}`.
pub(crate) fn one_swap_gate(k: u32, a: u32, b: u32) -> Result<Gate> {
    let swap = make_swap(&Word::new(k, vec![a])?, &Word::new(k, vec![b])?)?;
    make_controlled(&Word::new(k, vec![0])?, &swap)
}

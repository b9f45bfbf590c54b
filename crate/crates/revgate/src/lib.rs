//! Reversible-gate synthesis and analysis over finite alphabets.
//!
//! The crate models reversible gates (bijections on length-n words over a
//! k-symbol alphabet) as dense image tables, together with:
//!
//! - a circuit layer with ancilla wires and nested sub-circuits, where a gate
//!   is extracted from a circuit only if every ancilla is restored on every
//!   input ([`circuit`]);
//! - constructors for the standard gate families ([`constructors`]);
//! - invariant analysis: partition conservativity and the mod-m counting
//!   invariant `m(F)` ([`analysis`]);
//! - synthesizers that lower a target gate to a circuit over one of four
//!   generator libraries and whose output is verifiable by extraction
//!   ([`synth`]);
//! - group-theoretic oracles: breadth-first closure and stabilizer-chain
//!   membership over gate placements at fixed width ([`group`]);
//! - structural maps: symbol-permutation conjugation, base change to a
//!   larger alphabet, and a parity certificate that the `T_j` transposition
//!   family has no finite generating set ([`lattice`]);
//! - plain-text gate and circuit formats ([`files`]).
//!
//! All types are immutable after construction and safe to share across
//! threads; every operation is a pure function of its inputs.

pub mod analysis;
pub mod circuit;
pub mod constructors;
pub mod error;
pub mod files;
pub mod gate;
pub mod group;
pub mod lattice;
pub mod synth;
pub mod word;

pub use circuit::{Circuit, CircuitBuilder, PlacedOp, Placement};
pub use error::{Error, Result};
pub use gate::Gate;
pub use word::{Alphabet, Word};

use std::sync::OnceLock;

/// Default cap on dense image-table length.
pub const DEFAULT_TABLE_CAP: usize = 5_000_000;

/// Current dense-table cap: `REVGATE_TABLE_CAP` from the environment if set,
/// otherwise [`DEFAULT_TABLE_CAP`]. Read once per process.
pub fn table_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("REVGATE_TABLE_CAP")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_TABLE_CAP)
    })
}

/// `k^arity` as a table length, guarded by [`table_cap`].
pub fn checked_table_len(k: u32, arity: usize) -> Result<usize> {
    let cap = table_cap();
    let mut len: u128 = 1;
    for _ in 0..arity {
        len = len.saturating_mul(k as u128);
        if len > cap as u128 {
            return Err(Error::TableTooLarge { needed: len, cap });
        }
    }
    Ok(len as usize)
}

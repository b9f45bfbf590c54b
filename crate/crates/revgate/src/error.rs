//! Error type shared by the whole crate.

use thiserror::Error;

use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(u32),

    #[error("alphabet size must be at least {required} for this construction, got {got}")]
    AlphabetBelowMinimum { required: u32, got: u32 },

    #[error("symbol {symbol} out of range for alphabet of size {k}")]
    SymbolOutOfRange { symbol: u32, k: u32 },

    #[error("index {index} out of range for {k}^{arity} words")]
    IndexOutOfRange { index: usize, k: u32, arity: usize },

    #[error("word lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u32, right: u32 },

    #[error("gate arities differ: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("image table of length {len} is not a permutation of 0..{len}")]
    NotBijective { len: usize },

    #[error("dense table of {needed} entries exceeds the cap of {cap} (set REVGATE_TABLE_CAP to raise)")]
    TableTooLarge { needed: u128, cap: usize },

    #[error("not a permutation of wire positions: {0:?}")]
    MalformedPermutation(Vec<usize>),

    #[error("not a permutation of symbols: {0:?}")]
    MalformedSymbolPermutation(Vec<u32>),

    #[error("wire {wire} out of range for {wire_count} wires")]
    WireOutOfRange { wire: usize, wire_count: usize },

    #[error("wire {0} used more than once")]
    DuplicateWire(usize),

    #[error("input and ancilla wires must partition 0..{wire_count}")]
    WiresDoNotPartition { wire_count: usize },

    #[error("placement expects {expected} wires, got {got}")]
    PlacementWidthMismatch { expected: usize, got: usize },

    #[error("ancilla not restored on input {input}: wire {wire} ended as {found}, expected {expected}")]
    AncillaViolation {
        input: Word,
        wire: usize,
        expected: u32,
        found: u32,
    },

    #[error("no adjacency path between {from} and {to}")]
    Disconnected { from: Word, to: Word },

    #[error("gate is not conservative: input {witness} changes symbol counts")]
    NotConservative { witness: Word },

    #[error("gate is not conservative for the given partition: witness input {witness}")]
    NotLambdaConservative { witness: Word },

    #[error("gate is not mod-{m}-preserving: witness input {witness}")]
    NotModPreserving { m: u32, witness: Word },

    #[error("gate #{index} has no fixed point")]
    NoFixedPoint { index: usize },

    #[error("gate is count-preserving; no tensor witness exists")]
    NoTensorWitness,

    #[error("generated set exceeds the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },

    #[error("{points} points exceed the stabilizer-chain budget of {budget}")]
    ChainBudgetExceeded { points: usize, budget: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

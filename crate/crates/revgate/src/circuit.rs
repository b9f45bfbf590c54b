//! Circuits: wires, ancillas, and ordered placements of gates or sub-circuits.
//!
//! A circuit owns `wire_count` wires split between input wires (externally
//! visible, listed in order) and ancilla wires (each with the initial symbol
//! it must return to). Steps apply in sequence. A step may place a gate or a
//! nested circuit; a nested circuit runs on freshly allocated scratch wires
//! for its own ancillas, so inlining a nested placement never aliases state.
//!
//! Extraction succeeds only when every ancilla, at every nesting depth, is
//! restored for every input assignment.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::word::{self, Word};

/// One placed operation: a gate or a nested circuit on chosen wires.
#[derive(Debug, Clone)]
pub struct Placement {
    pub op: PlacedOp,
    pub wires: Vec<usize>,
}

#[derive(Clone)]
pub enum PlacedOp {
    Gate(Arc<Gate>),
    Circuit(Arc<Circuit>),
}

impl PlacedOp {
    pub fn k(&self) -> u32 {
        match self {
            PlacedOp::Gate(g) => g.k(),
            PlacedOp::Circuit(c) => c.k(),
        }
    }

    /// Number of wires the operation occupies when placed.
    pub fn width(&self) -> usize {
        match self {
            PlacedOp::Gate(g) => g.arity(),
            PlacedOp::Circuit(c) => c.input_count(),
        }
    }
}

impl fmt::Debug for PlacedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlacedOp::Gate(g) => write!(f, "Gate(arity={})", g.arity()),
            PlacedOp::Circuit(c) => write!(f, "Circuit(inputs={}, steps={})", c.input_count(), c.steps().len()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Circuit {
    k: u32,
    wire_count: usize,
    input_wires: Vec<usize>,
    ancillas: Vec<(usize, u32)>,
    steps: Vec<Placement>,
}

/// Where an ancilla-restoration failure was observed while running a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct AncillaFault {
    pub wire: usize,
    pub expected: u32,
    pub found: u32,
}

impl Circuit {
    pub fn new(
        k: u32,
        input_wires: Vec<usize>,
        ancillas: Vec<(usize, u32)>,
        steps: Vec<Placement>,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::AlphabetTooSmall(k));
        }
        let wire_count = input_wires.len() + ancillas.len();
        let mut seen = vec![false; wire_count];
        let mut mark = |wire: usize| -> Result<()> {
            if wire >= wire_count {
                return Err(Error::WireOutOfRange { wire, wire_count });
            }
            if seen[wire] {
                return Err(Error::DuplicateWire(wire));
            }
            seen[wire] = true;
            Ok(())
        };
        for &w in &input_wires {
            mark(w)?;
        }
        for &(w, sym) in &ancillas {
            mark(w)?;
            if sym >= k {
                return Err(Error::SymbolOutOfRange { symbol: sym, k });
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::WiresDoNotPartition { wire_count });
        }
        let circuit = Circuit { k, wire_count, input_wires, ancillas, steps: Vec::new() };
        let mut circuit = circuit;
        for step in steps {
            circuit.check_placement(&step)?;
            circuit.steps.push(step);
        }
        Ok(circuit)
    }

    fn check_placement(&self, placement: &Placement) -> Result<()> {
        if placement.op.k() != self.k {
            return Err(Error::AlphabetMismatch { left: self.k, right: placement.op.k() });
        }
        let width = placement.op.width();
        if placement.wires.len() != width {
            return Err(Error::PlacementWidthMismatch { expected: width, got: placement.wires.len() });
        }
        let mut seen = std::collections::HashSet::new();
        for &w in &placement.wires {
            if w >= self.wire_count {
                return Err(Error::WireOutOfRange { wire: w, wire_count: self.wire_count });
            }
            if !seen.insert(w) {
                return Err(Error::DuplicateWire(w));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn input_wires(&self) -> &[usize] {
        &self.input_wires
    }

    pub fn input_count(&self) -> usize {
        self.input_wires.len()
    }

    pub fn ancillas(&self) -> &[(usize, u32)] {
        &self.ancillas
    }

    pub fn steps(&self) -> &[Placement] {
        &self.steps
    }

    pub fn shared(self) -> Arc<Circuit> {
        Arc::new(self)
    }

    /// Run the circuit on a full wire state (inputs already written, ancillas
    /// written by this function). Records the first ancilla fault seen at any
    /// nesting depth without stopping.
    fn run_local(&self, state: &mut [u32], fault: &mut Option<AncillaFault>) {
        for &(wire, sym) in &self.ancillas {
            state[wire] = sym;
        }
        for placement in &self.steps {
            self.run_placement(placement, state, fault);
        }
        for &(wire, sym) in &self.ancillas {
            if state[wire] != sym && fault.is_none() {
                *fault = Some(AncillaFault { wire, expected: sym, found: state[wire] });
            }
        }
    }

    fn run_placement(&self, placement: &Placement, state: &mut [u32], fault: &mut Option<AncillaFault>) {
        match &placement.op {
            PlacedOp::Gate(gate) => {
                let mut buf = [0u32; 16];
                let n = placement.wires.len();
                if n <= 16 {
                    for (slot, &w) in buf[..n].iter_mut().zip(&placement.wires) {
                        *slot = state[w];
                    }
                    let out = gate.apply_index(word::encode(self.k, &buf[..n]));
                    word::decode_into(self.k, out, &mut buf[..n]);
                    for (&w, &s) in placement.wires.iter().zip(&buf[..n]) {
                        state[w] = s;
                    }
                } else {
                    let mut vals: Vec<u32> = placement.wires.iter().map(|&w| state[w]).collect();
                    let out = gate.apply_index(word::encode(self.k, &vals));
                    word::decode_into(self.k, out, &mut vals);
                    for (&w, &s) in placement.wires.iter().zip(&vals) {
                        state[w] = s;
                    }
                }
            }
            PlacedOp::Circuit(sub) => {
                let mut local = vec![0u32; sub.wire_count];
                for (i, &w) in placement.wires.iter().enumerate() {
                    local[sub.input_wires[i]] = state[w];
                }
                sub.run_local(&mut local, fault);
                for (i, &w) in placement.wires.iter().enumerate() {
                    state[w] = local[sub.input_wires[i]];
                }
            }
        }
    }

    /// Simulate on one input assignment. Returns the final input-wire values
    /// (in input order) and the final values of the declared ancillas (in
    /// declaration order). Ancilla faults are not errors here; they only
    /// matter for extraction.
    pub fn simulate(&self, assignment: &Word) -> Result<(Word, Vec<u32>)> {
        if assignment.k() != self.k {
            return Err(Error::AlphabetMismatch { left: self.k, right: assignment.k() });
        }
        if assignment.len() != self.input_wires.len() {
            return Err(Error::LengthMismatch {
                left: self.input_wires.len(),
                right: assignment.len(),
            });
        }
        let mut state = vec![0u32; self.wire_count];
        for (&w, &s) in self.input_wires.iter().zip(assignment.symbols()) {
            state[w] = s;
        }
        let mut fault = None;
        self.run_local(&mut state, &mut fault);
        let outputs: Vec<u32> = self.input_wires.iter().map(|&w| state[w]).collect();
        let finals: Vec<u32> = self.ancillas.iter().map(|&(w, _)| state[w]).collect();
        Ok((Word::new(self.k, outputs)?, finals))
    }

    /// Tabulate the gate computed on the input wires. Fails with a witness if
    /// any ancilla (at any depth) is left unrestored on some assignment.
    pub fn extract_gate(&self) -> Result<Gate> {
        let n = self.input_wires.len();
        let len = crate::checked_table_len(self.k, n)?;
        let mut image = vec![0u32; len];
        let mut state = vec![0u32; self.wire_count];
        let mut input = vec![0u32; n];
        for index in 0..len {
            word::decode_into(self.k, index, &mut input);
            for (&w, &s) in self.input_wires.iter().zip(&input) {
                state[w] = s;
            }
            let mut fault = None;
            self.run_local(&mut state, &mut fault);
            if let Some(f) = fault {
                return Err(Error::AncillaViolation {
                    input: Word::new(self.k, input)?,
                    wire: f.wire,
                    expected: f.expected,
                    found: f.found,
                });
            }
            let out: Vec<u32> = self.input_wires.iter().map(|&w| state[w]).collect();
            image[index] = word::encode(self.k, &out) as u32;
        }
        Gate::new(self.k, n, image)
    }

    /// Inline every nested placement, allocating fresh parent wires for the
    /// nested ancillas. The result has only gate placements and computes the
    /// same map on the original wires.
    pub fn inline_all(&self) -> Circuit {
        let mut ancillas = self.ancillas.clone();
        let mut steps = Vec::new();
        let mut next_wire = self.wire_count;
        inline_into(self, &(0..self.wire_count).map(Some).collect::<Vec<_>>(), &mut ancillas, &mut steps, &mut next_wire);
        Circuit {
            k: self.k,
            wire_count: next_wire,
            input_wires: self.input_wires.clone(),
            ancillas,
            steps,
        }
    }

    /// Total number of gate applications after full inlining.
    pub fn flat_len(&self) -> usize {
        self.steps
            .iter()
            .map(|p| match &p.op {
                PlacedOp::Gate(_) => 1,
                PlacedOp::Circuit(c) => c.flat_len(),
            })
            .sum()
    }
}

/// Recursively append flattened steps of `circuit`, whose wires map into the
/// root circuit via `wire_map` (indexed by the local wire number).
fn inline_into(
    circuit: &Circuit,
    wire_map: &[Option<usize>],
    ancillas: &mut Vec<(usize, u32)>,
    steps: &mut Vec<Placement>,
    next_wire: &mut usize,
) {
    let map = |w: usize| wire_map[w].expect("wire mapped");
    for placement in &circuit.steps {
        match &placement.op {
            PlacedOp::Gate(gate) => {
                steps.push(Placement {
                    op: PlacedOp::Gate(Arc::clone(gate)),
                    wires: placement.wires.iter().map(|&w| map(w)).collect(),
                });
            }
            PlacedOp::Circuit(sub) => {
                let mut sub_map: Vec<Option<usize>> = vec![None; sub.wire_count];
                for (i, &outer) in placement.wires.iter().enumerate() {
                    sub_map[sub.input_wires[i]] = Some(map(outer));
                }
                for &(wire, sym) in &sub.ancillas {
                    sub_map[wire] = Some(*next_wire);
                    ancillas.push((*next_wire, sym));
                    *next_wire += 1;
                }
                inline_into(sub, &sub_map, ancillas, steps, next_wire);
            }
        }
    }
}

/// Convenience builder. Input wires are `0..inputs`; ancillas are allocated
/// after them in creation order.
pub struct CircuitBuilder {
    k: u32,
    inputs: usize,
    ancillas: Vec<u32>,
    steps: Vec<Placement>,
}

impl CircuitBuilder {
    pub fn new(k: u32, inputs: usize) -> Self {
        CircuitBuilder { k, inputs, ancillas: Vec::new(), steps: Vec::new() }
    }

    /// Allocate an ancilla wire with the given initial symbol (0-based).
    pub fn ancilla(&mut self, init: u32) -> usize {
        let wire = self.inputs + self.ancillas.len();
        self.ancillas.push(init);
        wire
    }

    pub fn gate(&mut self, gate: Arc<Gate>, wires: Vec<usize>) -> &mut Self {
        self.steps.push(Placement { op: PlacedOp::Gate(gate), wires });
        self
    }

    pub fn sub(&mut self, circuit: Arc<Circuit>, wires: Vec<usize>) -> &mut Self {
        self.steps.push(Placement { op: PlacedOp::Circuit(circuit), wires });
        self
    }

    pub fn build(self) -> Result<Circuit> {
        let input_wires: Vec<usize> = (0..self.inputs).collect();
        let ancillas: Vec<(usize, u32)> = self
            .ancillas
            .iter()
            .enumerate()
            .map(|(i, &sym)| (self.inputs + i, sym))
            .collect();
        Circuit::new(self.k, input_wires, ancillas, self.steps)
    }
}

//! Collapsing a finite gate set with fixed points into one generator.

use crate::circuit::{Circuit, CircuitBuilder};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::word;

/// Tensor the gates into a single combined generator and return, per input
/// gate, a circuit recovering it from the combined gate alone: every other
/// block is pinned to a fixed point by ancillas.
pub fn combine_single_generator(gates: &[Gate]) -> Result<(Gate, Vec<Circuit>)> {
    let mut fixed_points: Vec<Vec<u32>> = Vec::with_capacity(gates.len());
    for (index, gate) in gates.iter().enumerate() {
        let fixed = gate
            .entries()
            .find(|(i, o)| i == o)
            .map(|(i, _)| word::decode(gate.k(), gate.arity(), i))
            .ok_or(Error::NoFixedPoint { index })?;
        fixed_points.push(fixed);
    }
    let mut combined = gates
        .first()
        .ok_or(Error::NoFixedPoint { index: 0 })?
        .clone();
    for gate in &gates[1..] {
        combined = combined.tensor(gate)?;
    }
    let combined_arc = combined.clone().shared();

    let mut recoveries = Vec::with_capacity(gates.len());
    for (index, gate) in gates.iter().enumerate() {
        let mut builder = CircuitBuilder::new(gate.k(), gate.arity());
        let mut wires = Vec::with_capacity(combined.arity());
        for j in 0..gates.len() {
            if j == index {
                wires.extend(0..gate.arity());
            } else {
                for &sym in &fixed_points[j] {
                    wires.push(builder.ancilla(sym));
                }
            }
        }
        builder.gate(combined_arc.clone(), wires);
        recoveries.push(builder.build()?);
    }
    Ok((combined, recoveries))
}

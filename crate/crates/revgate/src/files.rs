//! Plain-text gate and circuit formats, and the builtin gate descriptors.
//!
//! Gate file: a header line `k n` followed by the `k^n` image entries
//! (encoded indices) on one line. Circuit file: header `k W`, one `input`
//! line, `ancilla` lines (symbols written 1-based), named `gate` lines, and
//! `apply` steps. Serialization is canonical: parsing a serialized value and
//! serializing again is byte-identical.

use std::sync::Arc;

use crate::circuit::{Circuit, PlacedOp, Placement};
use crate::constructors;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::word::Word;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Serialize a gate canonically.
pub fn serialize_gate(gate: &Gate) -> String {
    let mut out = format!("{} {}\n", gate.k(), gate.arity());
    let entries: Vec<String> = gate.table().iter().map(|e| e.to_string()).collect();
    out.push_str(&entries.join(" "));
    out.push('\n');
    out
}

/// Parse a gate file.
pub fn parse_gate(text: &str) -> Result<Gate> {
    let mut lines = text.lines().enumerate();
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty gate file"))?;
    let mut parts = header.split_whitespace();
    let k: u32 = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln + 1, "expected alphabet size"))?;
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln + 1, "expected arity"))?;
    if parts.next().is_some() {
        return Err(parse_err(ln + 1, "trailing tokens after header"));
    }
    let mut image = Vec::new();
    for (ln, line) in lines {
        for token in line.split_whitespace() {
            let entry: u32 = token
                .parse()
                .map_err(|_| parse_err(ln + 1, format!("bad table entry '{token}'")))?;
            image.push(entry);
        }
    }
    let expected = crate::checked_table_len(k, n)?;
    if image.len() != expected {
        return Err(parse_err(0, format!("expected {expected} entries, found {}", image.len())));
    }
    Gate::new(k, n, image)
}

/// Parse a builtin gate descriptor: `tau u v | swap u v | ctrl w <spec> |
/// perm p1 .. pn | cc m | t j | id n | inline n e0 e1 ..`.
pub fn parse_gate_spec(k: u32, tokens: &[&str]) -> Result<Gate> {
    let err = |msg: String| parse_err(0, msg);
    let word_at = |i: usize| -> Result<Word> {
        let token = tokens.get(i).ok_or_else(|| err("missing word".into()))?;
        Word::parse(k, token)
    };
    let int_at = |i: usize| -> Result<u32> {
        tokens
            .get(i)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err("missing integer argument".into()))
    };
    let exact = |len: usize| -> Result<()> {
        if tokens.len() == len {
            Ok(())
        } else {
            Err(err(format!("expected {len} tokens, found {}", tokens.len())))
        }
    };
    match *tokens.first().ok_or_else(|| err("empty gate descriptor".into()))? {
        "tau" => {
            exact(3)?;
            constructors::make_tau(&word_at(1)?, &word_at(2)?)
        }
        "swap" => {
            exact(3)?;
            constructors::make_swap(&word_at(1)?, &word_at(2)?)
        }
        "ctrl" => {
            if tokens.len() < 3 {
                return Err(err("ctrl needs a word and a nested descriptor".into()));
            }
            let w = word_at(1)?;
            let inner = parse_gate_spec(k, &tokens[2..])?;
            constructors::make_controlled(&w, &inner)
        }
        "perm" => {
            let mut sigma = Vec::new();
            for token in &tokens[1..] {
                let position: usize = token
                    .parse()
                    .map_err(|_| err(format!("bad position '{token}'")))?;
                let position = position
                    .checked_sub(1)
                    .ok_or_else(|| err("positions are written 1-based".into()))?;
                sigma.push(position);
            }
            constructors::make_perm_gate(k, &sigma)
        }
        "cc" => {
            exact(2)?;
            constructors::make_cc(int_at(1)?, k)
        }
        "t" => {
            exact(2)?;
            constructors::make_t(int_at(1)?, k)
        }
        "id" => {
            exact(2)?;
            Gate::identity(k, int_at(1)? as usize)
        }
        "inline" => {
            let n = int_at(1)? as usize;
            let image: Vec<u32> = tokens[2..]
                .iter()
                .map(|t| t.parse().map_err(|_| err(format!("bad entry '{t}'"))))
                .collect::<Result<_>>()?;
            Gate::new(k, n, image)
        }
        other => Err(err(format!("unknown gate descriptor '{other}'"))),
    }
}

/// Serialize a circuit canonically: nested placements are inlined, gates are
/// named `g0, g1, ..` in first-use order and written inline.
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let flat = circuit.inline_all();
    let mut out = format!("{} {}\n", flat.k(), flat.wire_count());
    let inputs: Vec<String> = flat.input_wires().iter().map(|w| w.to_string()).collect();
    out.push_str("input");
    for token in &inputs {
        out.push(' ');
        out.push_str(token);
    }
    out.push('\n');
    let mut ancillas: Vec<(usize, u32)> = flat.ancillas().to_vec();
    ancillas.sort_by_key(|&(w, _)| w);
    for (wire, sym) in ancillas {
        out.push_str(&format!("ancilla {} {}\n", wire, sym + 1));
    }
    let mut named: Vec<Arc<Gate>> = Vec::new();
    let mut steps = Vec::new();
    for placement in flat.steps() {
        let gate = match &placement.op {
            PlacedOp::Gate(g) => g,
            PlacedOp::Circuit(_) => unreachable!("inline_all leaves only gates"),
        };
        let id = match named.iter().position(|g| g.table() == gate.table()) {
            Some(i) => i,
            None => {
                named.push(Arc::clone(gate));
                named.len() - 1
            }
        };
        steps.push((id, placement.wires.clone()));
    }
    for (i, gate) in named.iter().enumerate() {
        let entries: Vec<String> = gate.table().iter().map(|e| e.to_string()).collect();
        out.push_str(&format!("gate g{i} inline {} {}\n", gate.arity(), entries.join(" ")));
    }
    for (id, wires) in steps {
        out.push_str(&format!("apply g{id}"));
        for w in wires {
            out.push_str(&format!(" {w}"));
        }
        out.push('\n');
    }
    out
}

/// Resolver for `gate NAME file <path>` references.
pub type FileLoader = dyn Fn(&str) -> std::io::Result<String>;

/// Parse a circuit file. `load` resolves `gate NAME file <path>` references
/// to file contents; pass `None` to reject them.
pub fn parse_circuit(text: &str, load: Option<&FileLoader>) -> Result<Circuit> {
    let mut k: Option<u32> = None;
    let mut wire_count = 0usize;
    let mut input_wires: Option<Vec<usize>> = None;
    let mut ancillas: Vec<(usize, u32)> = Vec::new();
    let mut gates: Vec<(String, Arc<Gate>)> = Vec::new();
    let mut steps: Vec<Placement> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if k.is_none() {
            if tokens.len() != 2 {
                return Err(parse_err(ln, "expected header 'k W'"));
            }
            k = Some(
                tokens[0]
                    .parse()
                    .map_err(|_| parse_err(ln, "bad alphabet size"))?,
            );
            wire_count = tokens[1]
                .parse()
                .map_err(|_| parse_err(ln, "bad wire count"))?;
            continue;
        }
        let k = k.unwrap();
        match tokens[0] {
            "input" => {
                if input_wires.is_some() {
                    return Err(parse_err(ln, "duplicate input line"));
                }
                let wires: Vec<usize> = tokens[1..]
                    .iter()
                    .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad wire '{t}'"))))
                    .collect::<Result<_>>()?;
                input_wires = Some(wires);
            }
            "ancilla" => {
                if tokens.len() != 3 {
                    return Err(parse_err(ln, "expected 'ancilla wire symbol'"));
                }
                let wire: usize = tokens[1]
                    .parse()
                    .map_err(|_| parse_err(ln, "bad ancilla wire"))?;
                let sym: u32 = tokens[2]
                    .parse()
                    .map_err(|_| parse_err(ln, "bad ancilla symbol"))?;
                let sym = sym
                    .checked_sub(1)
                    .ok_or_else(|| parse_err(ln, "symbols are written 1-based"))?;
                ancillas.push((wire, sym));
            }
            "gate" => {
                if tokens.len() < 3 {
                    return Err(parse_err(ln, "expected 'gate NAME <descriptor>'"));
                }
                let name = tokens[1].to_string();
                if gates.iter().any(|(n, _)| *n == name) {
                    return Err(parse_err(ln, format!("duplicate gate name '{name}'")));
                }
                let gate = if tokens[2] == "file" {
                    let path = tokens
                        .get(3)
                        .ok_or_else(|| parse_err(ln, "missing file path"))?;
                    let loader =
                        load.ok_or_else(|| parse_err(ln, "file references are not allowed here"))?;
                    let content = loader(path)
                        .map_err(|e| parse_err(ln, format!("cannot read '{path}': {e}")))?;
                    parse_gate(&content)?
                } else {
                    parse_gate_spec(k, &tokens[2..])?
                };
                if gate.k() != k {
                    return Err(parse_err(ln, "gate alphabet differs from circuit"));
                }
                gates.push((name, gate.shared()));
            }
            "apply" => {
                if tokens.len() < 2 {
                    return Err(parse_err(ln, "expected 'apply NAME wires..'"));
                }
                let gate = gates
                    .iter()
                    .find(|(n, _)| n == tokens[1])
                    .map(|(_, g)| Arc::clone(g))
                    .ok_or_else(|| parse_err(ln, format!("unknown gate '{}'", tokens[1])))?;
                let wires: Vec<usize> = tokens[2..]
                    .iter()
                    .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad wire '{t}'"))))
                    .collect::<Result<_>>()?;
                steps.push(Placement { op: PlacedOp::Gate(gate), wires });
            }
            other => return Err(parse_err(ln, format!("unknown directive '{other}'"))),
        }
    }
    let k = k.ok_or_else(|| parse_err(0, "missing header"))?;
    let input_wires = input_wires.ok_or_else(|| parse_err(0, "missing input line"))?;
    if input_wires.len() + ancillas.len() != wire_count {
        return Err(parse_err(0, "input and ancilla lines do not cover the declared wires"));
    }
    Circuit::new(k, input_wires, ancillas, steps)
}

//! Constructors for the named gate families: transpositions, swaps,
//! controlled gates, wire permutations, and the CC/T families.

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::word::{self, Word};

/// The transposition exchanging words `u` and `v`, identity elsewhere.
/// `u = v` yields the identity gate.
pub fn make_tau(u: &Word, v: &Word) -> Result<Gate> {
    if u.k() != v.k() {
        return Err(Error::AlphabetMismatch { left: u.k(), right: v.k() });
    }
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    let k = u.k();
    let n = u.len();
    let len = crate::checked_table_len(k, n)?;
    let mut image: Vec<u32> = (0..len as u32).collect();
    let (i, j) = (u.index(), v.index());
    image.swap(i, j);
    Gate::new(k, n, image)
}

/// `SWAP_{u,v}`: exchanges the concatenations `uv` and `vu`.
pub fn make_swap(u: &Word, v: &Word) -> Result<Gate> {
    make_tau(&u.concat(v)?, &v.concat(u)?)
}

/// `w-F`: applies `F` to the suffix exactly when the prefix equals `w`.
pub fn make_controlled(w: &Word, gate: &Gate) -> Result<Gate> {
    if w.k() != gate.k() {
        return Err(Error::AlphabetMismatch { left: w.k(), right: gate.k() });
    }
    let k = w.k();
    let arity = w.len() + gate.arity();
    let len = crate::checked_table_len(k, arity)?;
    let suffix_len = gate.table_len();
    let mut image: Vec<u32> = (0..len as u32).collect();
    let base = w.index() * suffix_len;
    for s in 0..suffix_len {
        image[base + s] = (base + gate.apply_index(s)) as u32;
    }
    Gate::new(k, arity, image)
}

/// The free wire-permutation gate: output position `i` carries input
/// position `sigma[i]` (0-based positions).
pub fn make_perm_gate(k: u32, sigma: &[usize]) -> Result<Gate> {
    let n = sigma.len();
    let mut seen = vec![false; n];
    for &p in sigma {
        if p >= n || seen[p] {
            return Err(Error::MalformedPermutation(sigma.to_vec()));
        }
        seen[p] = true;
    }
    let len = crate::checked_table_len(k, n)?;
    let mut image = Vec::with_capacity(len);
    let mut input = vec![0u32; n];
    let mut output = vec![0u32; n];
    for index in 0..len {
        word::decode_into(k, index, &mut input);
        for (i, &src) in sigma.iter().enumerate() {
            output[i] = input[src];
        }
        image.push(word::encode(k, &output) as u32);
    }
    Gate::new(k, n, image)
}

/// The two-wire crossing, used for free block swaps.
pub fn wire_swap(k: u32) -> Result<Gate> {
    make_perm_gate(k, &[1, 0])
}

/// `CC_m`: on `m + 1` wires, exchanges `1·1^m` and `1·k^m` (display symbols),
/// fixing all other words.
pub fn make_cc(m: u32, k: u32) -> Result<Gate> {
    if m < 1 {
        return Err(Error::Parse { line: 0, message: format!("cc requires m >= 1, got {m}") });
    }
    let mut u = vec![0u32; m as usize + 1];
    let mut v = vec![k - 1; m as usize + 1];
    u[0] = 0;
    v[0] = 0;
    make_tau(&Word::new(k, u)?, &Word::new(k, v)?)
}

/// `T_j`: the transposition of `1^j 2` and `1^j 3` (display symbols) on
/// `j + 1` wires. Requires at least three symbols.
pub fn make_t(j: u32, k: u32) -> Result<Gate> {
    if k < 3 {
        return Err(Error::AlphabetBelowMinimum { required: 3, got: k });
    }
    let mut u = vec![0u32; j as usize + 1];
    let mut v = vec![0u32; j as usize + 1];
    u[j as usize] = 1;
    v[j as usize] = 2;
    make_tau(&Word::new(k, u)?, &Word::new(k, v)?)
}

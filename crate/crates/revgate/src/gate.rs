//! Dense reversible gates: bijections on length-n words stored as image tables.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::word::{self, Word};

/// A reversible gate on `arity` wires over a k-symbol alphabet, stored as a
/// dense table: `image[i]` is the encoded output word for encoded input `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    k: u32,
    arity: usize,
    image: Vec<u32>,
}

impl Gate {
    /// Build a gate from its image table, checking bijectivity.
    pub fn new(k: u32, arity: usize, image: Vec<u32>) -> Result<Self> {
        if k < 2 {
            return Err(Error::AlphabetTooSmall(k));
        }
        let len = crate::checked_table_len(k, arity)?;
        if image.len() != len {
            return Err(Error::NotBijective { len: image.len() });
        }
        let mut seen = vec![false; len];
        for &out in &image {
            let out = out as usize;
            if out >= len || seen[out] {
                return Err(Error::NotBijective { len });
            }
            seen[out] = true;
        }
        Ok(Gate { k, arity, image })
    }

    /// The identity gate on `arity` wires.
    pub fn identity(k: u32, arity: usize) -> Result<Self> {
        let len = crate::checked_table_len(k, arity)?;
        if k < 2 {
            return Err(Error::AlphabetTooSmall(k));
        }
        Ok(Gate { k, arity, image: (0..len as u32).collect() })
    }

    /// The unique gate on zero wires.
    pub fn empty(k: u32) -> Result<Self> {
        Gate::identity(k, 0)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u32] {
        &self.image
    }

    pub fn table_len(&self) -> usize {
        self.image.len()
    }

    pub fn apply_index(&self, index: usize) -> usize {
        self.image[index] as usize
    }

    pub fn apply_word(&self, input: &Word) -> Result<Word> {
        if input.k() != self.k {
            return Err(Error::AlphabetMismatch { left: self.k, right: input.k() });
        }
        if input.len() != self.arity {
            return Err(Error::LengthMismatch { left: self.arity, right: input.len() });
        }
        Word::from_index(self.k, self.arity, self.apply_index(input.index()))
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &o)| i == o as usize)
    }

    /// Composition `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Gate) -> Result<Gate> {
        if self.k != other.k {
            return Err(Error::AlphabetMismatch { left: self.k, right: other.k });
        }
        if self.arity != other.arity {
            return Err(Error::ArityMismatch { left: self.arity, right: other.arity });
        }
        let image = other.image.iter().map(|&m| self.image[m as usize]).collect();
        Ok(Gate { k: self.k, arity: self.arity, image })
    }

    /// Tensor product: `self` on the first block of wires, `other` on the second.
    pub fn tensor(&self, other: &Gate) -> Result<Gate> {
        if self.k != other.k {
            return Err(Error::AlphabetMismatch { left: self.k, right: other.k });
        }
        let arity = self.arity + other.arity;
        let len = crate::checked_table_len(self.k, arity)?;
        let right = other.image.len();
        let mut image = Vec::with_capacity(len);
        for &a in &self.image {
            let base = a as usize * right;
            for &b in &other.image {
                image.push((base + b as usize) as u32);
            }
        }
        Ok(Gate { k: self.k, arity, image })
    }

    pub fn inverse(&self) -> Gate {
        let mut image = vec![0u32; self.image.len()];
        for (i, &o) in self.image.iter().enumerate() {
            image[o as usize] = i as u32;
        }
        Gate { k: self.k, arity: self.arity, image }
    }

    /// Order of the gate as a permutation of its input words.
    pub fn order(&self) -> u64 {
        let len = self.image.len();
        let mut seen = vec![false; len];
        let mut order = 1u64;
        for start in 0..len {
            if seen[start] {
                continue;
            }
            let mut cycle = 0u64;
            let mut point = start;
            loop {
                seen[point] = true;
                cycle += 1;
                point = self.image[point] as usize;
                if point == start {
                    break;
                }
            }
            order = lcm(order, cycle);
        }
        order
    }

    /// If this gate only permutes wire positions, recover the permutation:
    /// `Some(sigma)` with output position `i` carrying input position `sigma[i]`.
    pub fn wire_permutation(&self) -> Option<Vec<usize>> {
        let n = self.arity;
        let mut sigma_inv = vec![usize::MAX; n];
        let mut probe = vec![0u32; n];
        let mut out = vec![0u32; n];
        for pos in 0..n {
            probe[pos] = 1;
            let idx = word::encode(self.k, &probe);
            word::decode_into(self.k, self.apply_index(idx), &mut out);
            probe[pos] = 0;
            let target = out.iter().position(|&s| s == 1)?;
            if out.iter().filter(|&&s| s != 0).count() != 1 {
                return None;
            }
            if sigma_inv[pos] != usize::MAX {
                return None;
            }
            sigma_inv[pos] = target;
        }
        // sigma_inv maps input position -> output position; invert it.
        let mut sigma = vec![usize::MAX; n];
        for (input, &output) in sigma_inv.iter().enumerate() {
            if sigma[output] != usize::MAX {
                return None;
            }
            sigma[output] = input;
        }
        // Confirm against the full table.
        let candidate = crate::constructors::make_perm_gate(self.k, &sigma).ok()?;
        if candidate == *self {
            Some(sigma)
        } else {
            None
        }
    }

    /// Iterate `(input_index, output_index)` pairs.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.image.iter().enumerate().map(|(i, &o)| (i, o as usize))
    }

    pub fn shared(self) -> Arc<Gate> {
        Arc::new(self)
    }
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gate(k={}, arity={}", self.k, self.arity)?;
        if self.image.len() <= 32 {
            write!(f, ", image={:?}", self.image)?;
        }
        write!(f, ")")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

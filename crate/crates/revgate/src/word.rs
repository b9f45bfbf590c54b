//! Alphabets, words, and the mixed-radix word/index codec.
//!
//! Symbols are stored 0-based internally; every displayed or parsed form
//! uses 1-based symbols (so internal 0 prints as `1`). A word of length n
//! over k symbols is identified with an integer in `0..k^n` by reading the
//! word as a base-k numeral, first symbol most significant. Lexicographic
//! word order therefore equals numeric index order.

use std::fmt;

use crate::error::{Error, Result};

/// A finite alphabet of size `k >= 2`. Symbols are `0..k-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    k: u32,
}

impl Alphabet {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::AlphabetTooSmall(k));
        }
        Ok(Alphabet { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn symbols(&self) -> impl Iterator<Item = u32> {
        0..self.k
    }

    pub fn check_symbol(&self, s: u32) -> Result<()> {
        if s < self.k {
            Ok(())
        } else {
            Err(Error::SymbolOutOfRange { symbol: s, k: self.k })
        }
    }

    /// Number of words of the given length, if it fits in `usize`.
    pub fn word_count(&self, len: usize) -> Result<usize> {
        crate::checked_table_len(self.k, len)
    }
}

/// A fixed-length word over an alphabet of size `k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    k: u32,
    symbols: Vec<u32>,
}

impl Word {
    pub fn new(k: u32, symbols: Vec<u32>) -> Result<Self> {
        let alphabet = Alphabet::new(k)?;
        for &s in &symbols {
            alphabet.check_symbol(s)?;
        }
        Ok(Word { k, symbols })
    }

    /// Word from 1-based symbols, as written in display form.
    pub fn from_one_based(k: u32, symbols: &[u32]) -> Result<Self> {
        let internal: Vec<u32> = symbols
            .iter()
            .map(|&s| s.checked_sub(1).ok_or(Error::SymbolOutOfRange { symbol: 0, k }))
            .collect::<Result<_>>()?;
        Word::new(k, internal)
    }

    pub fn empty(k: u32) -> Result<Self> {
        Word::new(k, Vec::new())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<u32> {
        self.symbols
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.k != other.k {
            return Err(Error::AlphabetMismatch { left: self.k, right: other.k });
        }
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word::new(self.k, symbols)
    }

    /// Big-endian mixed-radix index of this word.
    pub fn index(&self) -> usize {
        encode(self.k, &self.symbols)
    }

    /// Inverse of [`Word::index`] for a fixed length.
    pub fn from_index(k: u32, len: usize, index: usize) -> Result<Self> {
        let count = crate::checked_table_len(k, len)?;
        if index >= count {
            return Err(Error::IndexOutOfRange { index, k, arity: len });
        }
        Ok(Word { k, symbols: decode(k, len, index) })
    }

    /// Parse the display form: contiguous digits for k <= 9, comma-separated
    /// 1-based integers for larger alphabets. The empty word is `-`.
    pub fn parse(k: u32, text: &str) -> Result<Self> {
        let err = |msg: String| Error::Parse { line: 0, message: msg };
        if text == "-" {
            return Word::empty(k);
        }
        let one_based: Vec<u32> = if k <= 9 && !text.contains(',') {
            text.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| err(format!("bad symbol '{c}' in word"))))
                .collect::<Result<_>>()?
        } else {
            text.split(',')
                .map(|part| part.trim().parse::<u32>().map_err(|_| err(format!("bad symbol '{part}' in word"))))
                .collect::<Result<_>>()?
        };
        Word::from_one_based(k, &one_based)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "-");
        }
        if self.k <= 9 {
            for &s in &self.symbols {
                write!(f, "{}", s + 1)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(|s| (s + 1).to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

/// Big-endian mixed-radix encoding of a symbol slice.
pub fn encode(k: u32, symbols: &[u32]) -> usize {
    let mut index = 0usize;
    for &s in symbols {
        index = index * k as usize + s as usize;
    }
    index
}

/// Decode `index` into `len` symbols, first symbol most significant.
pub fn decode(k: u32, len: usize, index: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    let mut rest = index;
    for slot in out.iter_mut().rev() {
        *slot = (rest % k as usize) as u32;
        rest /= k as usize;
    }
    out
}

/// Decode into a caller-provided buffer, avoiding allocation in hot loops.
pub fn decode_into(k: u32, index: usize, out: &mut [u32]) {
    let mut rest = index;
    for slot in out.iter_mut().rev() {
        *slot = (rest % k as usize) as u32;
        rest /= k as usize;
    }
}

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported alphabet; symbols render as the digits `0-9a-z`.
pub const MAX_ALPHABET: u32 = 36;

/// The symbol set `{0, …, p-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Alphabet(u32);

impl Alphabet {
    pub fn new(size: u32) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&size) {
            return Err(Error::invalid(format!("alphabet size must be in 2..={MAX_ALPHABET}, got {size}")));
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> u32 {
        self.0
    }

    pub(crate) fn p(self) -> u64 {
        self.0 as u64
    }

    pub fn symbols(self) -> impl Iterator<Item = u8> {
        (0..self.0).map(|s| s as u8)
    }

    /// `p^n`, or `None` when it overflows `u64`.
    pub fn count_words(self, n: u32) -> Option<u64> {
        self.p().checked_pow(n)
    }

    pub fn digit_char(self, symbol: u8) -> char {
        std::char::from_digit(symbol as u32, MAX_ALPHABET).expect("symbol within alphabet")
    }

    pub fn parse_digit(self, c: char) -> Result<u8> {
        match c.to_digit(MAX_ALPHABET) {
            Some(d) if d < self.0 => Ok(d as u8),
            Some(d) => Err(Error::invalid(format!("symbol {d} out of range for alphabet of size {}", self.0))),
            None => Err(Error::invalid(format!("{c:?} is not a digit"))),
        }
    }

    pub fn check(self, symbol: u8) -> Result<()> {
        if (symbol as u32) < self.0 {
            Ok(())
        } else {
            Err(Error::invalid(format!("symbol {symbol} out of range for alphabet of size {}", self.0)))
        }
    }
}

impl TryFrom<u32> for Alphabet {
    type Error = Error;

    fn try_from(size: u32) -> Result<Self> {
        Alphabet::new(size)
    }
}

impl From<Alphabet> for u32 {
    fn from(a: Alphabet) -> u32 {
        a.0
    }
}

/// A finite word `a_0 … a_{n-1}`; the empty word names the whole space.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(alphabet: Alphabet, symbols: Vec<u8>) -> Result<Self> {
        for &s in &symbols {
            alphabet.check(s)?;
        }
        Ok(Word(symbols))
    }

    pub fn parse(alphabet: Alphabet, digits: &str) -> Result<Self> {
        let symbols = digits.chars().map(|c| alphabet.parse_digit(c)).collect::<Result<Vec<_>>>()?;
        Ok(Word(symbols))
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Base-`p` index with the first symbol most significant; equal-length
    /// words sort lexicographically by index.
    pub fn index(&self, alphabet: Alphabet) -> u64 {
        word_index(&self.0, alphabet)
    }

    pub fn from_index(alphabet: Alphabet, index: u64, len: u32) -> Self {
        Word(index_symbols(index, len, alphabet))
    }

    pub fn to_digits(&self, alphabet: Alphabet) -> String {
        self.0.iter().map(|&s| alphabet.digit_char(s)).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", std::char::from_digit(s as u32, MAX_ALPHABET).unwrap_or('?'))?;
        }
        Ok(())
    }
}

pub(crate) fn word_index(symbols: &[u8], alphabet: Alphabet) -> u64 {
    symbols.iter().fold(0u64, |acc, &s| acc * alphabet.p() + s as u64)
}

pub(crate) fn index_symbols(mut index: u64, len: u32, alphabet: Alphabet) -> Vec<u8> {
    let mut out = vec![0u8; len as usize];
    for slot in out.iter_mut().rev() {
        *slot = (index % alphabet.p()) as u8;
        index /= alphabet.p();
    }
    out
}

pub(crate) fn index_digits(index: u64, len: u32, alphabet: Alphabet) -> String {
    index_symbols(index, len, alphabet).into_iter().map(|s| alphabet.digit_char(s)).collect()
}

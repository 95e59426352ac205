use std::fmt;

use super::word::{Alphabet, Word};
use crate::error::{Error, Result};

/// An eventually periodic infinite word `u · v v v …`, kept with minimal
/// period and minimal preperiod.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointWord {
    alphabet: Alphabet,
    preperiod: Vec<u8>,
    period: Vec<u8>,
}

impl PointWord {
    pub fn new(alphabet: Alphabet, preperiod: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::invalid("period must be nonempty"));
        }
        for &s in preperiod.iter().chain(&period) {
            alphabet.check(s)?;
        }
        let mut point = PointWord { alphabet, preperiod, period };
        point.normalize();
        Ok(point)
    }

    /// Parse `"PRE:PER"`, e.g. `"1:0"` for `1·0^∞` or `":01"` for `(01)^∞`.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let (pre, per) =
            text.split_once(':').ok_or_else(|| Error::invalid(format!("point {text:?} must look like PRE:PER")))?;
        let pre = Word::parse(alphabet, pre.trim())?;
        let per = Word::parse(alphabet, per.trim())?;
        PointWord::new(alphabet, pre.symbols().to_vec(), per.symbols().to_vec())
    }

    fn normalize(&mut self) {
        let n = self.period.len();
        if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| self.period[i] == self.period[i - d]))
        {
            self.period.truncate(d);
        }
        while let Some(&last) = self.preperiod.last() {
            if last != *self.period.last().expect("nonempty period") {
                break;
            }
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn symbol(&self, i: usize) -> u8 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word::new(self.alphabet, (0..n).map(|i| self.symbol(i)).collect()).expect("symbols already validated")
    }

    /// `σ(x)`: drop the first symbol.
    pub fn shift(&self) -> PointWord {
        let mut pre = self.preperiod.clone();
        let mut per = self.period.clone();
        if pre.is_empty() {
            per.rotate_left(1);
        } else {
            pre.remove(0);
        }
        PointWord::new(self.alphabet, pre, per).expect("shift keeps validity")
    }

    pub fn map_symbols(&self, map: impl Fn(u8) -> u8) -> Result<PointWord> {
        PointWord::new(
            self.alphabet,
            self.preperiod.iter().map(|&s| map(s)).collect(),
            self.period.iter().map(|&s| map(s)).collect(),
        )
    }
}

impl fmt::Display for PointWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = |s: &[u8]| s.iter().map(|&c| self.alphabet.digit_char(c)).collect::<String>();
        write!(f, "{}:{}", digits(&self.preperiod), digits(&self.period))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn canonical_form() {
        let x = PointWord::parse(a2(), "0101:0101").unwrap();
        assert_eq!(x.to_string(), ":01");
        let y = PointWord::parse(a2(), "110:10").unwrap();
        assert_eq!(y.to_string(), "1:10");
        let z = PointWord::parse(a2(), "111:1").unwrap();
        assert_eq!(z.to_string(), ":1");
        assert!(PointWord::parse(a2(), "01").is_err());
        assert!(PointWord::parse(a2(), "0:").is_err());
    }

    #[test]
    fn symbols_and_shift() {
        let x = PointWord::parse(a2(), "1:0").unwrap();
        assert_eq!(x.prefix(4).to_digits(a2()), "1000");
        assert_eq!(x.shift().to_string(), ":0");
        let y = PointWord::parse(a2(), ":01").unwrap();
        assert_eq!(y.shift().to_string(), ":10");
        assert_eq!(y.shift().shift(), y);
    }
}

//! Set expressions over cylinders.
//!
//! ```text
//! expr   := term { ("+" | "-") term }
//! term   := factor { "&" factor }
//! factor := "~" factor | atom
//! atom   := "U:" digits | "ALL" | "EMPTY" | "(" expr ")"
//! ```
//!
//! `+` is union, `-` difference, `&` intersection and `~` complement.
//! Binary operators associate to the left; digits are base-`p` symbols.

use super::clopen::ClopenSet;
use super::word::{Alphabet, Word};
use crate::error::{Error, Result};

pub fn parse_set_expr(text: &str, alphabet: Alphabet) -> Result<ClopenSet> {
    let mut parser = Parser { chars: text.chars().collect(), pos: 0, alphabet };
    let set = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error(format!("unexpected {:?}", parser.chars[parser.pos])));
    }
    Ok(set)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    alphabet: Alphabet,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let end = self.pos + kw.len();
        if end <= self.chars.len() && self.chars[self.pos..end].iter().copied().eq(kw.chars()) {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ClopenSet> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.union(&self.term()?)?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.difference(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ClopenSet> {
        let mut acc = self.factor()?;
        while self.peek() == Some('&') {
            self.pos += 1;
            acc = acc.intersection(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<ClopenSet> {
        if self.peek() == Some('~') {
            self.pos += 1;
            return Ok(self.factor()?.complement());
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<ClopenSet> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) if self.eat_keyword("U:") => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                let word = Word::parse(self.alphabet, &digits).map_err(|e| match e {
                    Error::InvalidArgument(msg) => Error::InvalidArgument(format!("{msg} (at position {start})")),
                    other => other,
                })?;
                ClopenSet::cylinder(self.alphabet, &word)
            }
            Some(_) if self.eat_keyword("ALL") => Ok(ClopenSet::full(self.alphabet)),
            Some(_) if self.eat_keyword("EMPTY") => Ok(ClopenSet::empty(self.alphabet)),
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

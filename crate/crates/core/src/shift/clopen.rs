use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::PointWord;
use super::word::{index_digits, index_symbols, word_index, Alphabet, Word};
use crate::error::{Error, Result};

/// Upper bound on the number of words any single refinement may produce.
pub const MAX_WORDS: u64 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

/// A clopen subset of `Σ^ℕ`, stored as the set of length-`depth` words whose
/// cylinders it is the union of.
///
/// The depth is minimal: the set is not a union of cylinders of length
/// `depth - 1`. Together with sorted, deduplicated word indices this makes
/// the representation unique, so structural equality is set equality.
/// `Ω` is `(0, [ε])`, `∅` is `(0, [])`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClopenSet {
    alphabet: Alphabet,
    depth: u32,
    words: Vec<u64>,
}

impl ClopenSet {
    pub fn empty(alphabet: Alphabet) -> Self {
        ClopenSet { alphabet, depth: 0, words: Vec::new() }
    }

    pub fn full(alphabet: Alphabet) -> Self {
        ClopenSet { alphabet, depth: 0, words: vec![0] }
    }

    /// `U_ω`: all infinite words with prefix `ω`.
    pub fn cylinder(alphabet: Alphabet, word: &Word) -> Result<Self> {
        for &s in word.symbols() {
            alphabet.check(s)?;
        }
        let depth = word.len() as u32;
        check_depth(alphabet, depth)?;
        Ok(ClopenSet { alphabet, depth, words: vec![word.index(alphabet)] })
    }

    /// Cylinder from a digit string such as `"01"`.
    pub fn cylinder_str(alphabet: Alphabet, digits: &str) -> Result<Self> {
        ClopenSet::cylinder(alphabet, &Word::parse(alphabet, digits)?)
    }

    /// The union of the cylinders of the given length-`depth` word indices.
    pub fn from_indices(alphabet: Alphabet, depth: u32, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let total = check_depth(alphabet, depth)?;
        let mut words: Vec<u64> = indices.into_iter().collect();
        if let Some(&bad) = words.iter().find(|&&w| w >= total) {
            return Err(Error::invalid(format!("word index {bad} out of range at depth {depth}")));
        }
        words.sort_unstable();
        words.dedup();
        Ok(ClopenSet::canonical(alphabet, depth, words))
    }

    pub fn from_word_strings<'a>(
        alphabet: Alphabet,
        depth: u32,
        words: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self> {
        let mut indices = Vec::new();
        for w in words {
            let word = Word::parse(alphabet, w)?;
            if word.len() as u32 != depth {
                return Err(Error::invalid(format!("word {w:?} has length {}, expected {depth}", word.len())));
            }
            indices.push(word.index(alphabet));
        }
        ClopenSet::from_indices(alphabet, depth, indices)
    }

    /// Each length-`depth` word is included independently with probability 1/2.
    pub fn random<R: Rng + ?Sized>(alphabet: Alphabet, depth: u32, rng: &mut R) -> Result<Self> {
        let total = check_depth(alphabet, depth)?;
        let words = (0..total).filter(|_| rng.gen_bool(0.5));
        ClopenSet::from_indices(alphabet, depth, words)
    }

    /// Sorted, deduplicated words at `depth` → canonical form.
    fn canonical(alphabet: Alphabet, mut depth: u32, mut words: Vec<u64>) -> Self {
        let p = alphabet.p() as usize;
        while depth > 0 && words.len().is_multiple_of(p) {
            let collapsible = words.chunks(p).all(|c| c[0] % p as u64 == 0 && c[p - 1] == c[0] + (p as u64 - 1));
            if !collapsible {
                break;
            }
            words = words.chunks(p).map(|c| c[0] / p as u64).collect();
            depth -= 1;
        }
        ClopenSet { alphabet, depth, words }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Word indices at the canonical depth, ascending.
    pub fn indices(&self) -> &[u64] {
        &self.words
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        self.words.iter().map(move |&w| Word::from_index(self.alphabet, w, self.depth))
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.depth == 0 && !self.words.is_empty()
    }

    /// Is this a single cylinder `U_ω`?
    pub fn as_cylinder(&self) -> Option<Word> {
        match self.words.as_slice() {
            [w] => Some(Word::from_index(self.alphabet, *w, self.depth)),
            _ => None,
        }
    }

    /// The unique depth-`n` word set denoting this set.
    pub fn refine_to_depth(&self, n: u32) -> Result<Vec<u64>> {
        if n < self.depth {
            return Err(Error::invalid(format!("cannot refine a depth-{} set to depth {n}", self.depth)));
        }
        check_depth(self.alphabet, n)?;
        let factor = self.alphabet.p().pow(n - self.depth);
        let count = self.words.len() as u128 * factor as u128;
        if count > MAX_WORDS as u128 {
            return Err(Error::resource("refined word count", count, MAX_WORDS as u128));
        }
        let mut out = Vec::with_capacity(count as usize);
        for &w in &self.words {
            let base = w * factor;
            out.extend(base..base + factor);
        }
        Ok(out)
    }

    pub fn refine_words(&self, n: u32) -> Result<Vec<Word>> {
        Ok(self.refine_to_depth(n)?.into_iter().map(|w| Word::from_index(self.alphabet, w, n)).collect())
    }

    fn same_alphabet(&self, other: &ClopenSet) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::invalid(format!(
                "alphabet mismatch: {} vs {}",
                self.alphabet.size(),
                other.alphabet.size()
            )));
        }
        Ok(())
    }

    pub fn boolean_op(&self, kind: SetOp, other: &ClopenSet) -> Result<ClopenSet> {
        self.same_alphabet(other)?;
        let depth = self.depth.max(other.depth);
        let a = self.refine_to_depth(depth)?;
        let b = other.refine_to_depth(depth)?;
        let words = merge(&a, &b, kind);
        Ok(ClopenSet::canonical(self.alphabet, depth, words))
    }

    pub fn union(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.boolean_op(SetOp::Union, other)
    }

    pub fn intersection(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.boolean_op(SetOp::Intersection, other)
    }

    pub fn difference(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.boolean_op(SetOp::Difference, other)
    }

    pub fn complement(&self) -> ClopenSet {
        let total = self.alphabet.p().pow(self.depth);
        let mut words = Vec::with_capacity(total as usize - self.words.len());
        let mut present = self.words.iter().peekable();
        for w in 0..total {
            if present.peek() == Some(&&w) {
                present.next();
            } else {
                words.push(w);
            }
        }
        ClopenSet::canonical(self.alphabet, self.depth, words)
    }

    pub fn is_subset(&self, other: &ClopenSet) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> Result<bool> {
        Ok(self.intersection(other)?.is_empty())
    }

    /// `σ^{-k}(A)`: prepend every length-`k` word.
    pub fn shift_preimage(&self, k: u32) -> Result<ClopenSet> {
        if self.is_empty() || self.is_full() || k == 0 {
            return Ok(self.clone());
        }
        let depth = self.depth.checked_add(k).ok_or_else(|| Error::invalid("depth overflow"))?;
        check_depth(self.alphabet, depth)?;
        let prefixes = self.alphabet.p().pow(k);
        let count = prefixes as u128 * self.words.len() as u128;
        if count > MAX_WORDS as u128 {
            return Err(Error::resource("shift preimage word count", count, MAX_WORDS as u128));
        }
        let stride = self.alphabet.p().pow(self.depth);
        let mut words = Vec::with_capacity(count as usize);
        for t in 0..prefixes {
            words.extend(self.words.iter().map(|&w| t * stride + w));
        }
        Ok(ClopenSet::canonical(self.alphabet, depth, words))
    }

    /// `σ(A)`: drop the first symbol of every word.
    pub fn shift_image(&self) -> Result<ClopenSet> {
        if self.is_empty() || self.is_full() {
            return Ok(self.clone());
        }
        let stride = self.alphabet.p().pow(self.depth - 1);
        let mut words: Vec<u64> = self.words.iter().map(|&w| w % stride).collect();
        words.sort_unstable();
        words.dedup();
        Ok(ClopenSet::canonical(self.alphabet, self.depth - 1, words))
    }

    /// Apply a symbol substitution to every word (images of cylinders under a
    /// letter-to-letter map). `map` must send every symbol into the alphabet.
    pub(crate) fn map_words(&self, map: impl Fn(&[u8]) -> Vec<u8>) -> ClopenSet {
        let mut words: Vec<u64> = self
            .words
            .iter()
            .map(|&w| {
                let symbols = index_symbols(w, self.depth, self.alphabet);
                word_index(&map(&symbols), self.alphabet)
            })
            .collect();
        words.sort_unstable();
        words.dedup();
        ClopenSet::canonical(self.alphabet, self.depth, words)
    }

    pub fn contains_point(&self, x: &PointWord) -> Result<bool> {
        if x.alphabet() != self.alphabet {
            return Err(Error::invalid("point and set use different alphabets"));
        }
        let prefix = x.prefix(self.depth as usize);
        Ok(self.words.binary_search(&prefix.index(self.alphabet)).is_ok())
    }

    pub fn contains_word_prefix(&self, word: &Word) -> bool {
        if word.len() < self.depth as usize {
            return false;
        }
        let idx = word_index(&word.symbols()[..self.depth as usize], self.alphabet);
        self.words.binary_search(&idx).is_ok()
    }

    /// Decomposition into maximal cylinders, lexicographically ordered.
    pub fn maximal_cylinders(&self) -> Vec<Word> {
        let p = self.alphabet.p();
        let mut out: Vec<Word> = Vec::new();
        let mut level = self.words.clone();
        let mut depth = self.depth;
        while depth > 0 {
            let mut parents = Vec::new();
            let mut i = 0;
            while i < level.len() {
                let parent = level[i] / p;
                let mut j = i;
                while j < level.len() && level[j] / p == parent {
                    j += 1;
                }
                if (j - i) as u64 == p {
                    parents.push(parent);
                } else {
                    out.extend(level[i..j].iter().map(|&w| Word::from_index(self.alphabet, w, depth)));
                }
                i = j;
            }
            level = parents;
            depth -= 1;
        }
        if !level.is_empty() {
            out.push(Word::empty());
        }
        out.sort();
        out
    }

    /// Set expression that parses back to this set.
    pub fn to_expr(&self) -> String {
        if self.is_empty() {
            return "EMPTY".into();
        }
        if self.is_full() {
            return "ALL".into();
        }
        self.maximal_cylinders()
            .iter()
            .map(|w| format!("U:{}", w.to_digits(self.alphabet)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn word_strings(&self) -> Vec<String> {
        self.words.iter().map(|&w| index_digits(w, self.depth, self.alphabet)).collect()
    }
}

/// All cylinders `U_ω` with `|ω| ≤ max_depth`, shortest first, then lexicographic.
pub fn all_cylinders(alphabet: Alphabet, max_depth: u32) -> Result<Vec<ClopenSet>> {
    let mut out = Vec::new();
    for depth in 0..=max_depth {
        let total = check_depth(alphabet, depth)?;
        if out.len() as u64 + total > MAX_WORDS {
            return Err(Error::resource("cylinder count", out.len() as u128 + total as u128, MAX_WORDS as u128));
        }
        out.extend((0..total).map(|w| ClopenSet { alphabet, depth, words: vec![w] }));
    }
    Ok(out)
}

fn check_depth(alphabet: Alphabet, depth: u32) -> Result<u64> {
    alphabet
        .count_words(depth)
        .ok_or_else(|| Error::resource(format!("depth {depth} word space"), u128::MAX, u64::MAX as u128))
}

fn merge(a: &[u64], b: &[u64], kind: SetOp) -> Vec<u64> {
    let mut out = Vec::with_capacity(match kind {
        SetOp::Union => a.len() + b.len(),
        _ => a.len(),
    });
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                if kind != SetOp::Intersection {
                    out.push(a[i]);
                }
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                if kind == SetOp::Union {
                    out.push(b[j]);
                }
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                if kind != SetOp::Difference {
                    out.push(a[i]);
                }
                i += 1;
                j += 1;
            }
        }
    }
    if kind != SetOp::Intersection {
        out.extend_from_slice(&a[i..]);
    }
    if kind == SetOp::Union {
        out.extend_from_slice(&b[j..]);
    }
    out
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClopenSet(p={}, {})", self.alphabet.size(), self.to_expr())
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

#[derive(Serialize, Deserialize)]
struct ClopenRepr {
    p: Alphabet,
    depth: u32,
    words: Vec<String>,
}

impl Serialize for ClopenSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ClopenRepr { p: self.alphabet, depth: self.depth, words: self.word_strings() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClopenSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ClopenRepr::deserialize(deserializer)?;
        ClopenSet::from_word_strings(repr.p, repr.depth, repr.words.iter().map(String::as_str))
            .map_err(serde::de::Error::custom)
    }
}

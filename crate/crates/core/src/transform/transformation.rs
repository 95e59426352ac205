use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift::{Alphabet, ClopenSet, PointWord};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TransformKind {
    /// `σ`: drop the first symbol.
    Shift,
    /// Apply `π` to every symbol. The identity map is the identity permutation.
    Permutation(Vec<u8>),
    /// Add one with carry, the first symbol being least significant.
    Odometer,
}

/// A continuous self-map of `Σ^ℕ` whose preimages of clopen sets are clopen
/// and computable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transformation {
    alphabet: Alphabet,
    kind: TransformKind,
}

impl Transformation {
    pub fn shift(alphabet: Alphabet) -> Self {
        Transformation { alphabet, kind: TransformKind::Shift }
    }

    pub fn odometer(alphabet: Alphabet) -> Self {
        Transformation { alphabet, kind: TransformKind::Odometer }
    }

    pub fn identity(alphabet: Alphabet) -> Self {
        Transformation { alphabet, kind: TransformKind::Permutation(alphabet.symbols().collect()) }
    }

    pub fn permutation(alphabet: Alphabet, pi: Vec<u8>) -> Result<Self> {
        validate_permutation(alphabet, &pi)?;
        Ok(Transformation { alphabet, kind: TransformKind::Permutation(pi) })
    }

    /// The transposition of symbols `0` and `1`.
    pub fn swap(alphabet: Alphabet) -> Self {
        let mut pi: Vec<u8> = alphabet.symbols().collect();
        pi.swap(0, 1);
        Transformation { alphabet, kind: TransformKind::Permutation(pi) }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn kind(&self) -> &TransformKind {
        &self.kind
    }

    pub fn is_invertible(&self) -> bool {
        !matches!(self.kind, TransformKind::Shift)
    }

    pub fn is_identity(&self) -> bool {
        matches!(&self.kind, TransformKind::Permutation(pi) if pi.iter().enumerate().all(|(i, &s)| i == s as usize))
    }

    /// How much `preimage` can raise the depth of a set.
    pub fn depth_increase(&self) -> u32 {
        match self.kind {
            TransformKind::Shift => 1,
            _ => 0,
        }
    }

    /// Composition `self ∘ other` when it is again a permutation.
    pub fn compose(&self, other: &Transformation) -> Option<Transformation> {
        match (&self.kind, &other.kind) {
            (TransformKind::Permutation(a), TransformKind::Permutation(b)) if self.alphabet == other.alphabet => {
                let pi = b.iter().map(|&s| a[s as usize]).collect();
                Some(Transformation { alphabet: self.alphabet, kind: TransformKind::Permutation(pi) })
            }
            _ => None,
        }
    }

    fn check(&self, set: &ClopenSet) -> Result<()> {
        if set.alphabet() != self.alphabet {
            return Err(Error::invalid(format!(
                "set over alphabet {} but transformation over {}",
                set.alphabet().size(),
                self.alphabet.size()
            )));
        }
        Ok(())
    }

    /// `T^{-1}(A)`.
    pub fn preimage(&self, set: &ClopenSet) -> Result<ClopenSet> {
        self.check(set)?;
        match &self.kind {
            TransformKind::Shift => set.shift_preimage(1),
            TransformKind::Permutation(pi) => {
                let inv = invert(pi);
                Ok(set.map_words(|w| w.iter().map(|&s| inv[s as usize]).collect()))
            }
            TransformKind::Odometer => {
                let p = self.alphabet.size() as u8;
                Ok(set.map_words(|w| predecessor(w, p)))
            }
        }
    }

    /// `T^{-k}(A)`.
    pub fn preimage_iter(&self, set: &ClopenSet, k: u32) -> Result<ClopenSet> {
        if let TransformKind::Shift = self.kind {
            self.check(set)?;
            return set.shift_preimage(k);
        }
        let mut out = set.clone();
        for _ in 0..k {
            out = self.preimage(&out)?;
        }
        Ok(out)
    }

    /// `T(A)`. For the shift this is the forward image of a non-injective map.
    pub fn image(&self, set: &ClopenSet) -> Result<ClopenSet> {
        self.check(set)?;
        match &self.kind {
            TransformKind::Shift => set.shift_image(),
            TransformKind::Permutation(pi) => Ok(set.map_words(|w| w.iter().map(|&s| pi[s as usize]).collect())),
            TransformKind::Odometer => {
                let p = self.alphabet.size() as u8;
                Ok(set.map_words(|w| successor(w, p)))
            }
        }
    }

    /// `T(x)` on an eventually periodic point.
    pub fn apply_point(&self, x: &PointWord) -> Result<PointWord> {
        if x.alphabet() != self.alphabet {
            return Err(Error::invalid("point and transformation use different alphabets"));
        }
        match &self.kind {
            TransformKind::Shift => Ok(x.shift()),
            TransformKind::Permutation(pi) => x.map_symbols(|s| pi[s as usize]),
            TransformKind::Odometer => odometer_point(x, self.alphabet),
        }
    }
}

impl fmt::Display for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TransformKind::Shift => write!(f, "shift"),
            TransformKind::Odometer => write!(f, "odometer"),
            TransformKind::Permutation(_) if self.is_identity() => write!(f, "identity"),
            TransformKind::Permutation(pi) => {
                let parts: Vec<String> = pi.iter().map(ToString::to_string).collect();
                write!(f, "perm:{}", parts.join(","))
            }
        }
    }
}

fn validate_permutation(alphabet: Alphabet, pi: &[u8]) -> Result<()> {
    if pi.len() != alphabet.size() as usize {
        return Err(Error::invalid(format!(
            "permutation has {} entries, alphabet has {} symbols",
            pi.len(),
            alphabet.size()
        )));
    }
    let mut seen = vec![false; pi.len()];
    for &s in pi {
        alphabet.check(s)?;
        if std::mem::replace(&mut seen[s as usize], true) {
            return Err(Error::invalid(format!("symbol {s} repeated in permutation")));
        }
    }
    Ok(())
}

fn invert(pi: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; pi.len()];
    for (i, &s) in pi.iter().enumerate() {
        inv[s as usize] = i as u8;
    }
    inv
}

/// Add one to a little-endian base-`p` digit string, dropping the final carry.
pub(crate) fn successor(word: &[u8], p: u8) -> Vec<u8> {
    let mut out = word.to_vec();
    for d in out.iter_mut() {
        if *d + 1 == p {
            *d = 0;
        } else {
            *d += 1;
            break;
        }
    }
    out
}

/// Subtract one from a little-endian base-`p` digit string, modulo `p^n`.
pub(crate) fn predecessor(word: &[u8], p: u8) -> Vec<u8> {
    let mut out = word.to_vec();
    for d in out.iter_mut() {
        if *d == 0 {
            *d = p - 1;
        } else {
            *d -= 1;
            break;
        }
    }
    out
}

/// `x + 1`. The carry either stops inside the first preperiod-plus-period
/// symbols or runs forever through a period of `p - 1`s, giving `0^∞`
/// on that tail.
fn odometer_point(x: &PointWord, alphabet: Alphabet) -> Result<PointWord> {
    let top = (alphabet.size() - 1) as u8;
    let span = x.preperiod().len() + x.period().len();
    let head: Vec<u8> = (0..span).map(|i| x.symbol(i)).collect();
    if head.iter().all(|&s| s == top) {
        return PointWord::new(alphabet, Vec::new(), vec![0]);
    }
    // The period is realigned at `span`, so `head` can serve as the preperiod.
    PointWord::new(alphabet, successor(&head, top + 1), x.period().to_vec())
}

/// JSON form: `{"kind":"shift"}`, `{"kind":"perm","pi":[1,0]}`,
/// `{"kind":"odometer"}` or `{"kind":"identity"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TransformSpec {
    Shift,
    Perm { pi: Vec<u8> },
    Odometer,
    Identity,
}

impl TransformSpec {
    /// Accepts JSON or the shorthands `shift`, `odometer`, `identity`,
    /// `swap` and `perm:1,0`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            return serde_json::from_str(text).map_err(|e| Error::invalid(format!("transformation: {e}")));
        }
        match text {
            "shift" => Ok(TransformSpec::Shift),
            "odometer" => Ok(TransformSpec::Odometer),
            "identity" | "id" => Ok(TransformSpec::Identity),
            "swap" => Ok(TransformSpec::Perm { pi: vec![1, 0] }),
            _ => {
                let list = text
                    .strip_prefix("perm:")
                    .ok_or_else(|| Error::invalid(format!("unknown transformation {text:?}")))?;
                let pi = list
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<u8>().map_err(|e| Error::invalid(format!("permutation entry {s:?}: {e}")))
                    })
                    .collect::<Result<Vec<u8>>>()?;
                Ok(TransformSpec::Perm { pi })
            }
        }
    }

    pub fn build(&self, alphabet: Alphabet) -> Result<Transformation> {
        Ok(match self {
            TransformSpec::Shift => Transformation::shift(alphabet),
            TransformSpec::Odometer => Transformation::odometer(alphabet),
            TransformSpec::Identity => Transformation::identity(alphabet),
            TransformSpec::Perm { pi } => {
                // `swap` on a larger alphabet fixes the remaining symbols
                let mut full = pi.clone();
                if full.len() < alphabet.size() as usize && full == [1, 0] {
                    full.extend(2..alphabet.size() as u8);
                }
                Transformation::permutation(alphabet, full)?
            }
        })
    }
}

impl From<&Transformation> for TransformSpec {
    fn from(t: &Transformation) -> Self {
        match t.kind() {
            TransformKind::Shift => TransformSpec::Shift,
            TransformKind::Odometer => TransformSpec::Odometer,
            TransformKind::Permutation(_) if t.is_identity() => TransformSpec::Identity,
            TransformKind::Permutation(pi) => TransformSpec::Perm { pi: pi.clone() },
        }
    }
}

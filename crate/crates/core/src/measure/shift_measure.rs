use std::collections::HashMap;

use serde::Serialize;

use crate::arith::{Prime, Rational, UltraNorm, Valuation};
use crate::error::{Error, Result};
use crate::shift::{Alphabet, ClopenSet, PointWord, Word};

/// Shift-invariant product measure `μ(U_ω) = q_{ω_0} ⋯ q_{ω_{n-1}}`.
///
/// Weights must sum to one and satisfy `|q_i|_ℓ ≤ 1`; together these force
/// `max_i |q_i|_ℓ = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BernoulliMeasure {
    alphabet: Alphabet,
    value_prime: Prime,
    weights: Vec<Rational>,
}

impl BernoulliMeasure {
    pub fn new(alphabet: Alphabet, value_prime: Prime, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != alphabet.size() as usize {
            return Err(Error::invalid(format!("expected {} weights, got {}", alphabet.size(), weights.len())));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| w.abs(value_prime) > UltraNorm::one(value_prime))
        {
            return Err(Error::invalid(format!("weight q_{i} = {w} has |q_{i}|_{value_prime} > 1")));
        }
        Ok(BernoulliMeasure { alphabet, value_prime, weights })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn value_prime(&self) -> Prime {
        self.value_prime
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }
}

/// Uniform measure `μ(U_ω) = p^{-|ω|}` with values in `Q_ℓ`, `ℓ ≠ p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HaarMeasure {
    alphabet: Alphabet,
    value_prime: Prime,
}

impl HaarMeasure {
    pub fn new(alphabet: Alphabet, value_prime: Prime) -> Result<Self> {
        if alphabet.size() as u64 == value_prime.get() {
            return Err(Error::invalid(
                "Haar measure needs a value prime different from the alphabet size (unbounded otherwise)",
            ));
        }
        Ok(HaarMeasure { alphabet, value_prime })
    }

    pub fn to_bernoulli(self) -> Result<BernoulliMeasure> {
        let w = Rational::new(1, self.alphabet.size())?;
        BernoulliMeasure::new(self.alphabet, self.value_prime, vec![w; self.alphabet.size() as usize])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Bernoulli,
    Haar,
}

/// A measure on the clopen algebra of `Σ^ℕ` together with the per-symbol
/// valuations that every norm query reduces to.
#[derive(Debug, Clone)]
pub struct MeasureContext {
    kind: MeasureKind,
    measure: BernoulliMeasure,
    valuations: Vec<Valuation>,
}

impl From<BernoulliMeasure> for MeasureContext {
    fn from(measure: BernoulliMeasure) -> Self {
        MeasureContext::with_kind(MeasureKind::Bernoulli, measure)
    }
}

impl TryFrom<HaarMeasure> for MeasureContext {
    type Error = Error;

    fn try_from(haar: HaarMeasure) -> Result<Self> {
        Ok(MeasureContext::with_kind(MeasureKind::Haar, haar.to_bernoulli()?))
    }
}

impl MeasureContext {
    fn with_kind(kind: MeasureKind, measure: BernoulliMeasure) -> Self {
        let valuations = measure.weights.iter().map(|w| w.valuation(measure.value_prime)).collect();
        MeasureContext { kind, measure, valuations }
    }

    /// Bernoulli measure from integer/rational literals, e.g. `["-2", "3"]`.
    pub fn bernoulli(p: u32, value_prime: u64, weights: &[&str]) -> Result<Self> {
        let weights = weights.iter().map(|w| w.parse()).collect::<Result<Vec<Rational>>>()?;
        Ok(BernoulliMeasure::new(Alphabet::new(p)?, Prime::new(value_prime)?, weights)?.into())
    }

    pub fn haar(p: u32, value_prime: u64) -> Result<Self> {
        HaarMeasure::new(Alphabet::new(p)?, Prime::new(value_prime)?)?.try_into()
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn alphabet(&self) -> Alphabet {
        self.measure.alphabet
    }

    pub fn value_prime(&self) -> Prime {
        self.measure.value_prime
    }

    pub fn weights(&self) -> &[Rational] {
        &self.measure.weights
    }

    pub fn bernoulli_measure(&self) -> &BernoulliMeasure {
        &self.measure
    }

    /// `v_ℓ(q_s)` for each symbol.
    pub fn weight_valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    /// Every weight is an `ℓ`-adic unit, so every nonempty clopen has norm 1.
    pub fn is_unit_norm(&self) -> bool {
        self.valuations.iter().all(|v| *v == Valuation::Finite(0))
    }

    fn check_alphabet(&self, set: &ClopenSet) -> Result<()> {
        if set.alphabet() != self.alphabet() {
            return Err(Error::invalid(format!(
                "set over alphabet {} but measure over {}",
                set.alphabet().size(),
                self.alphabet().size()
            )));
        }
        Ok(())
    }

    pub fn cylinder_measure(&self, word: &Word) -> Rational {
        word.symbols().iter().map(|&s| &self.measure.weights[s as usize]).product()
    }

    /// `μ(A)`, summed over the cylinders of the canonical representation,
    /// grouping words by their symbol counts.
    pub fn measure_of(&self, set: &ClopenSet) -> Result<Rational> {
        self.check_alphabet(set)?;
        let p = self.alphabet().size() as usize;
        let depth = set.depth();
        let mut classes: HashMap<Vec<u32>, u64> = HashMap::new();
        for &w in set.indices() {
            let mut counts = vec![0u32; p];
            let mut rest = w;
            for _ in 0..depth {
                counts[(rest % p as u64) as usize] += 1;
                rest /= p as u64;
            }
            *classes.entry(counts).or_default() += 1;
        }
        let mut powers: Vec<Vec<Rational>> = Vec::with_capacity(p);
        for q in &self.measure.weights {
            let mut row = vec![Rational::one()];
            for k in 1..=depth as usize {
                let next = &row[k - 1] * q;
                row.push(next);
            }
            powers.push(row);
        }
        let mut total = Rational::zero();
        for (counts, mult) in classes {
            let term: Rational = counts.iter().enumerate().map(|(s, &c)| powers[s][c as usize].clone()).product();
            total += &(term * Rational::from(mult as i64));
        }
        Ok(total)
    }

    /// `v_ℓ(μ(U_ω))` without forming the product.
    pub fn cylinder_valuation(&self, symbols: &[u8]) -> Valuation {
        symbols.iter().fold(Valuation::Finite(0), |acc, &s| acc + self.valuations[s as usize])
    }

    /// `‖A‖ = sup{|μ(B)| : B ⊆ A}`, computed as the largest `|μ(U_w)|` over
    /// the words `w` of `A`. Sub-cylinders never exceed their parent and
    /// unions never exceed the largest part, so the supremum is attained on
    /// a cylinder of the decomposition.
    pub fn norm_of(&self, set: &ClopenSet) -> Result<UltraNorm> {
        self.check_alphabet(set)?;
        let depth = set.depth();
        let p = self.alphabet().size() as u64;
        let best = set
            .indices()
            .iter()
            .map(|&w| {
                let mut rest = w;
                let mut v = Valuation::Finite(0);
                for _ in 0..depth {
                    v = v + self.valuations[(rest % p) as usize];
                    rest /= p;
                }
                v
            })
            .min()
            .unwrap_or(Valuation::Infinite);
        Ok(UltraNorm::from_valuation(self.value_prime(), best))
    }

    /// `N_μ(x) = inf{‖U‖ : x ∈ U}`, the limit of the cylinder norms along `x`.
    pub fn point_norm(&self, x: &PointWord) -> Result<UltraNorm> {
        if x.alphabet() != self.alphabet() {
            return Err(Error::invalid("point and measure use different alphabets"));
        }
        if x.period().iter().any(|&s| self.valuations[s as usize] != Valuation::Finite(0)) {
            return Ok(UltraNorm::Zero);
        }
        Ok(UltraNorm::from_valuation(self.value_prime(), self.cylinder_valuation(x.preperiod())))
    }

    pub fn is_negligible(&self, set: &ClopenSet) -> Result<bool> {
        Ok(self.norm_of(set)?.is_zero())
    }
}

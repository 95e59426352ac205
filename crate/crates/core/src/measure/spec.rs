//! JSON descriptions of the supported measures.

use serde::{Deserialize, Serialize};

use super::counting::CountingMeasure;
use super::shift_measure::{BernoulliMeasure, HaarMeasure, MeasureContext};
use crate::arith::{Prime, Rational};
use crate::error::{Error, Result};
use crate::shift::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureSpec {
    Bernoulli { p: u32, value_prime: u64, weights: Vec<Rational> },
    Haar { p: u32, value_prime: u64 },
    Counting { labels: Vec<String>, h: Vec<Rational>, value_prime: u64 },
}

/// A validated measure of either family.
#[derive(Debug, Clone)]
pub enum AnyMeasure {
    Shift(MeasureContext),
    Counting(CountingMeasure),
}

impl MeasureSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("measure spec: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure spec serializes")
    }

    pub fn build(&self) -> Result<AnyMeasure> {
        Ok(match self {
            MeasureSpec::Bernoulli { p, value_prime, weights } => AnyMeasure::Shift(
                BernoulliMeasure::new(Alphabet::new(*p)?, Prime::new(*value_prime)?, weights.clone())?.into(),
            ),
            MeasureSpec::Haar { p, value_prime } => {
                AnyMeasure::Shift(HaarMeasure::new(Alphabet::new(*p)?, Prime::new(*value_prime)?)?.try_into()?)
            }
            MeasureSpec::Counting { labels, h, value_prime } => {
                AnyMeasure::Counting(CountingMeasure::new(labels.clone(), h.clone(), Prime::new(*value_prime)?)?)
            }
        })
    }

    /// Build, insisting on a measure over the shift space.
    pub fn build_shift(&self) -> Result<MeasureContext> {
        match self.build()? {
            AnyMeasure::Shift(m) => Ok(m),
            AnyMeasure::Counting(_) => Err(Error::invalid("this operation needs a bernoulli or haar measure")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_three_forms() {
        let b = MeasureSpec::from_json(r#"{"kind":"bernoulli","p":2,"value_prime":3,"weights":["-2","3"]}"#).unwrap();
        assert!(matches!(b.build().unwrap(), AnyMeasure::Shift(_)));
        let h = MeasureSpec::from_json(r#"{"kind":"haar","p":2,"value_prime":3}"#).unwrap();
        assert!(h.build_shift().unwrap().is_unit_norm());
        let c =
            MeasureSpec::from_json(r#"{"kind":"counting","labels":["a","b"],"h":["0","5"],"value_prime":5}"#).unwrap();
        assert!(matches!(c.build().unwrap(), AnyMeasure::Counting(_)));
        assert!(c.build_shift().is_err());
    }

    #[test]
    fn round_trip_and_validation() {
        let b = MeasureSpec::Bernoulli { p: 3, value_prime: 5, weights: vec!["-2".parse().unwrap(); 2] };
        assert_eq!(MeasureSpec::from_json(&b.to_json()).unwrap(), b);
        assert!(b.build().is_err());
        let bad = MeasureSpec::from_json(r#"{"kind":"bernoulli","p":2,"value_prime":3,"weights":["-2","2"]}"#).unwrap();
        assert!(matches!(bad.build(), Err(Error::InvalidArgument(_))));
        assert!(MeasureSpec::from_json(r#"{"kind":"lebesgue"}"#).is_err());
    }
}

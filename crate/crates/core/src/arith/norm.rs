use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::prime::Prime;
use super::rational::Valuation;

/// A value in `{ℓ^z : z ∈ ℤ} ∪ {0}`, stored by exponent.
///
/// `Power { prime, exponent }` denotes `prime^(-exponent)`, so larger
/// exponents are smaller norms. Norms over different primes compare by
/// their real value; multiplying them is only meaningful when one side is
/// zero or has exponent zero.
#[derive(Debug, Clone, Copy)]
pub enum UltraNorm {
    Zero,
    Power { prime: Prime, exponent: i64 },
}

impl UltraNorm {
    pub fn one(prime: Prime) -> Self {
        UltraNorm::Power { prime, exponent: 0 }
    }

    pub fn power(prime: Prime, exponent: i64) -> Self {
        UltraNorm::Power { prime, exponent }
    }

    pub fn from_valuation(prime: Prime, v: Valuation) -> Self {
        match v {
            Valuation::Finite(e) => UltraNorm::Power { prime, exponent: e },
            Valuation::Infinite => UltraNorm::Zero,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, UltraNorm::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, UltraNorm::Power { exponent: 0, .. })
    }

    /// The exponent `e` in `ℓ^(-e)`; `None` for the zero norm.
    pub fn exponent(&self) -> Option<i64> {
        match self {
            UltraNorm::Zero => None,
            UltraNorm::Power { exponent, .. } => Some(*exponent),
        }
    }

    pub fn prime(&self) -> Option<Prime> {
        match self {
            UltraNorm::Zero => None,
            UltraNorm::Power { prime, .. } => Some(*prime),
        }
    }

    pub fn as_valuation(&self) -> Valuation {
        match self {
            UltraNorm::Zero => Valuation::Infinite,
            UltraNorm::Power { exponent, .. } => Valuation::Finite(*exponent),
        }
    }

    /// Exact real value as a rational.
    pub fn to_rational(&self) -> BigRational {
        match self {
            UltraNorm::Zero => BigRational::zero(),
            UltraNorm::Power { prime, exponent } => {
                let base = BigInt::from(prime.get());
                let mag = num_traits::pow(base, exponent.unsigned_abs() as usize);
                if *exponent >= 0 {
                    BigRational::new(BigInt::one(), mag)
                } else {
                    BigRational::from_integer(mag)
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            UltraNorm::Zero => 0.0,
            UltraNorm::Power { prime, exponent } => (prime.get() as f64).powf(-(*exponent as f64)),
        }
    }

    /// Product, or `None` when both factors are non-trivial powers of
    /// different primes.
    pub fn checked_mul(self, rhs: UltraNorm) -> Option<UltraNorm> {
        match (self, rhs) {
            (UltraNorm::Zero, _) | (_, UltraNorm::Zero) => Some(UltraNorm::Zero),
            (UltraNorm::Power { prime: p, exponent: a }, UltraNorm::Power { prime: q, exponent: b }) => {
                if p == q || b == 0 {
                    Some(UltraNorm::Power { prime: p, exponent: a + b })
                } else if a == 0 {
                    Some(UltraNorm::Power { prime: q, exponent: b })
                } else {
                    None
                }
            }
        }
    }
}

impl Mul for UltraNorm {
    type Output = UltraNorm;

    fn mul(self, rhs: UltraNorm) -> UltraNorm {
        self.checked_mul(rhs).expect("product of norms over different primes")
    }
}

impl PartialEq for UltraNorm {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for UltraNorm {}

impl PartialOrd for UltraNorm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UltraNorm {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (UltraNorm::Zero, UltraNorm::Zero) => Ordering::Equal,
            (UltraNorm::Zero, _) => Ordering::Less,
            (_, UltraNorm::Zero) => Ordering::Greater,
            (UltraNorm::Power { prime: p, exponent: a }, UltraNorm::Power { prime: q, exponent: b }) => {
                if p == q {
                    b.cmp(a)
                } else if *a == 0 && *b == 0 {
                    Ordering::Equal
                } else {
                    self.to_rational().cmp(&other.to_rational())
                }
            }
        }
    }
}

impl fmt::Display for UltraNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UltraNorm::Zero => f.write_str("0"),
            UltraNorm::Power { exponent: 0, .. } => f.write_str("1"),
            UltraNorm::Power { prime, exponent } => write!(f, "{}^{}", prime, -exponent),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NormRepr {
    Power { prime: Prime, exponent: i64 },
    Zero { zero: bool },
}

impl Serialize for UltraNorm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            UltraNorm::Zero => NormRepr::Zero { zero: true },
            UltraNorm::Power { prime, exponent } => NormRepr::Power { prime, exponent },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UltraNorm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match NormRepr::deserialize(deserializer)? {
            NormRepr::Power { prime, exponent } => Ok(UltraNorm::Power { prime, exponent }),
            NormRepr::Zero { zero: true } => Ok(UltraNorm::Zero),
            NormRepr::Zero { zero: false } => Err(serde::de::Error::custom("\"zero\" must be true")),
        }
    }
}

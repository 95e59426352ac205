use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{Prime, UltraNorm};

/// Significant digits in rendered entropies.
pub const DISPLAY_DIGITS: usize = 50;
/// Fractional bits kept by the fixed-point `log2`.
const LOG_BITS: u32 = 200;
/// Working precision of the squaring loop; each squaring doubles the
/// relative error, so this must exceed `2 * LOG_BITS`.
const WORK_BITS: u32 = 512;

/// `w · log2(M)` where the weight `w` is either 1 (topological entropy) or
/// an ultrametric norm `ℓ^{-e}` (measure entropy).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyValue {
    weight: Option<UltraNorm>,
    count: BigUint,
}

impl EntropyValue {
    pub fn measure(weight: UltraNorm, count: impl Into<BigUint>) -> Self {
        EntropyValue { weight: Some(weight), count: count.into() }
    }

    pub fn topological(count: impl Into<BigUint>) -> Self {
        EntropyValue { weight: None, count: count.into() }
    }

    pub fn count(&self) -> &BigUint {
        &self.count
    }

    /// `e` in the weight `ℓ^{-e}`; 0 for unit weight, `None` for weight 0.
    pub fn exponent(&self) -> Option<i64> {
        match &self.weight {
            None => Some(0),
            Some(w) => w.exponent(),
        }
    }

    pub fn prime(&self) -> Option<Prime> {
        self.weight.as_ref().and_then(UltraNorm::prime)
    }

    pub fn weight(&self) -> Option<&UltraNorm> {
        self.weight.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.count <= BigUint::one() || self.exponent().is_none()
    }

    fn weight_rational(&self) -> BigRational {
        match &self.weight {
            None => BigRational::one(),
            Some(w) => w.to_rational(),
        }
    }

    /// The value, accurate to about `2^{-LOG_BITS}` relative error.
    pub fn approx(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        self.weight_rational() * log2_approx(&self.count)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.approx())
    }

    pub fn decimal(&self) -> String {
        to_decimal(&self.approx(), DISPLAY_DIGITS)
    }

    /// The weights are comparable exactly when both are zero-valued or share
    /// the same exponent (and prime); then only the counts decide.
    fn same_weight(&self, other: &EntropyValue) -> bool {
        self.exponent() == other.exponent() && (self.prime() == other.prime() || self.exponent() == Some(0))
    }

    /// Exact comparison where the symbolic form allows it.
    pub fn exact_cmp(&self, other: &EntropyValue) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            _ if self.same_weight(other) => Some(self.count.cmp(&other.count)),
            _ => None,
        }
    }

    /// Exact when possible, otherwise decimal with tolerance `10^{-30}`.
    pub fn compare(&self, other: &EntropyValue) -> Ordering {
        self.exact_cmp(other).unwrap_or_else(|| approx_cmp(&self.approx(), &other.approx()))
    }

    /// `self / n == other / m`, exactly when the weights agree
    /// (`M_n^m = M_m^n`), otherwise to tolerance.
    pub fn ratio_eq(&self, n: u32, other: &EntropyValue, m: u32) -> bool {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return true,
            (true, false) | (false, true) => return false,
            _ => {}
        }
        if self.same_weight(other) {
            return Pow::pow(&self.count, m) == Pow::pow(&other.count, n);
        }
        let lhs = self.approx() / BigRational::from_integer(n.into());
        let rhs = other.approx() / BigRational::from_integer(m.into());
        approx_cmp(&lhs, &rhs) == Ordering::Equal
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.weight {
            None => write!(f, "log2({})", self.count),
            Some(w) => write!(f, "{w}·log2({})", self.count),
        }
    }
}

impl Serialize for EntropyValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            prime: Option<u64>,
            exponent: Option<i64>,
            count: String,
            decimal: String,
        }
        Repr {
            prime: self.prime().map(Prime::get),
            exponent: self.exponent(),
            count: self.count.to_string(),
            decimal: self.decimal(),
        }
        .serialize(serializer)
    }
}

pub(crate) fn tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u32).pow(30u32))
}

/// Compare with `|a - b| ≤ 10^{-30}` counted as equal.
pub fn approx_cmp(a: &BigRational, b: &BigRational) -> Ordering {
    let diff = a - b;
    if diff.abs() <= tolerance() {
        Ordering::Equal
    } else if diff.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// `log2(m)` for `m ≥ 1` as a dyadic rational with `LOG_BITS` fractional
/// bits, by repeated squaring of the mantissa.
pub fn log2_approx(m: &BigUint) -> BigRational {
    assert!(!m.is_zero(), "log2 of zero");
    let k = m.bits() - 1;
    let one = BigUint::one() << WORK_BITS;
    let two = &one << 1u32;
    // mantissa m / 2^k in [1, 2) with WORK_BITS fractional bits
    let mut y = if k <= WORK_BITS as u64 { m << (WORK_BITS as u64 - k) } else { m >> (k - WORK_BITS as u64) };
    let mut frac = BigUint::zero();
    for _ in 0..LOG_BITS {
        y = (&y * &y) >> WORK_BITS;
        frac <<= 1u32;
        if y >= two {
            y >>= 1u32;
            frac += 1u32;
        }
    }
    let numer = (BigUint::from(k) << LOG_BITS) + frac;
    BigRational::new(BigInt::from(numer), BigInt::one() << LOG_BITS)
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    to_decimal(r, 20).parse().unwrap_or(f64::NAN)
}

/// Round to `digits` significant decimal digits, in plain positional form
/// with trailing zeros removed.
pub fn to_decimal(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let x = r.abs();
    // first guess for k with 10^{k-1} ≤ x < 10^k, then correct
    let mut k = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |e: i64| -> BigRational {
        if e >= 0 {
            Pow::pow(&ten, e as u64)
        } else {
            Pow::pow(&ten, (-e) as u64).recip()
        }
    };
    while x >= pow10(k) {
        k += 1;
    }
    while x < pow10(k - 1) {
        k -= 1;
    }
    let mut scaled = (&x * pow10(digits as i64 - k)).round().to_integer();
    if scaled.to_string().len() > digits {
        k += 1;
        scaled = (&x * pow10(digits as i64 - k)).round().to_integer();
    }
    let s = scaled.to_string();
    let body = if k <= 0 {
        format!("0.{}{}", "0".repeat((-k) as usize), s)
    } else if k as usize >= s.len() {
        format!("{}{}", s, "0".repeat(k as usize - s.len()))
    } else {
        format!("{}.{}", &s[..k as usize], &s[k as usize..])
    };
    let body = if body.contains('.') { body.trim_end_matches('0').trim_end_matches('.').to_string() } else { body };
    format!("{sign}{body}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn log2_of_powers_of_two_is_exact() {
        for k in 0..70u32 {
            let v = log2_approx(&(BigUint::one() << k));
            assert_eq!(v, BigRational::from_integer(k.into()));
        }
    }

    #[test]
    fn log2_three_digits() {
        // log2(3) = 1.5849625007211561814537389439478165087598144076924…
        let v = to_decimal(&log2_approx(&BigUint::from(3u32)), 50);
        assert_eq!(v, "1.5849625007211561814537389439478165087598144076925");
        // 2^x = 3 check at high precision: x * ln 2 ≈ ln 3 is not available
        // without floats, so compare against f64 too.
        assert!((rational_to_f64(&log2_approx(&BigUint::from(3u32))) - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn decimal_rendering() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(to_decimal(&r(1, 1), 50), "1");
        assert_eq!(to_decimal(&r(-3, 8), 50), "-0.375");
        assert_eq!(to_decimal(&r(1, 3), 5), "0.33333");
        assert_eq!(to_decimal(&r(2, 3), 5), "0.66667");
        assert_eq!(to_decimal(&r(1234567, 1), 3), "1230000");
        assert_eq!(to_decimal(&r(99999, 100000), 3), "1");
        assert_eq!(to_decimal(&r(1, 1000), 3), "0.001");
    }

    #[test]
    fn symbolic_values() {
        let h = EntropyValue::measure(UltraNorm::power(p(5), 1), 3u32);
        assert_eq!(h.to_string(), "5^-1·log2(3)");
        assert!((h.to_f64() - 3f64.log2() / 5.0).abs() < 1e-15);
        assert!(EntropyValue::measure(UltraNorm::one(p(5)), 1u32).is_zero());
        assert!(EntropyValue::measure(UltraNorm::Zero, 9u32).is_zero());
        let two = EntropyValue::measure(UltraNorm::one(p(5)), 2u32);
        assert_eq!(two.decimal(), "1");
        assert_eq!(two.exact_cmp(&EntropyValue::topological(2u32)), Some(Ordering::Equal));
        assert_eq!(h.exact_cmp(&two), None);
        assert_eq!(h.compare(&two), Ordering::Less);
    }

    #[test]
    fn ratio_equality() {
        let a = |e: i64, m: u32| EntropyValue::measure(UltraNorm::power(p(5), e), m);
        assert!(a(0, 2).ratio_eq(1, &a(0, 8), 3));
        assert!(!a(0, 2).ratio_eq(1, &a(0, 9), 3));
        assert!(!a(1, 3).ratio_eq(1, &a(2, 9), 2));
    }
}

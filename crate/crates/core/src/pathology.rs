//! The interval set function `υ(J_{r,s}) = 1/s − 1/r` (`1/s` when `r = 0`)
//! on the points of `[0, 1]` with non-terminating base-`p` expansions.
//!
//! `υ` is additive and bounded by 1, yet every point has a shrinking
//! family of intervals with `|υ| → 0`, so `N_υ ≡ 0` while `‖X‖_υ = 1`.
//! It is deliberately not a `MeasureContext`.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{Prime, Rational, UltraNorm};
use crate::error::{Error, Result};

/// Largest digit index evaluated by [`decay_sequence`].
pub const MAX_DECAY_TERMS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Rule {
    /// Finitely many known digits; reading past them is an error.
    Explicit(Vec<u8>),
    /// `prefix` followed by `period` repeated forever.
    Periodic { prefix: Vec<u8>, period: Vec<u8> },
}

/// Base-`p` digits `a_1 a_2 …` of `x = Σ a_i p^{-i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitStream {
    prime: Prime,
    rule: Rule,
}

fn check_digits(prime: Prime, digits: &[u8]) -> Result<()> {
    match digits.iter().find(|&&d| u64::from(d) >= prime.get()) {
        Some(d) => Err(Error::invalid(format!("digit {d} out of range for base {prime}"))),
        None => Ok(()),
    }
}

fn parse_digits(prime: Prime, text: &str) -> Result<Vec<u8>> {
    let digits = text
        .chars()
        .map(|c| c.to_digit(36).map(|d| d as u8).ok_or_else(|| Error::invalid(format!("bad digit {c:?}"))))
        .collect::<Result<Vec<u8>>>()?;
    check_digits(prime, &digits)?;
    Ok(digits)
}

impl DigitStream {
    pub fn explicit(prime: Prime, digits: Vec<u8>) -> Result<Self> {
        check_digits(prime, &digits)?;
        Ok(DigitStream { prime, rule: Rule::Explicit(digits) })
    }

    /// Rejects eventually constant expansions, which name the endpoints
    /// excluded from the space.
    pub fn periodic(prime: Prime, prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        check_digits(prime, &prefix)?;
        check_digits(prime, &period)?;
        if period.is_empty() {
            return Err(Error::invalid("the period must be nonempty"));
        }
        if period.iter().all(|&d| d == period[0]) {
            return Err(Error::invalid(format!(
                "digits are eventually constant ({}), so the point is not in the space",
                period[0]
            )));
        }
        Ok(DigitStream { prime, rule: Rule::Periodic { prefix, period } })
    }

    /// `"0101"` (explicit), `"period=01"`, or `"1,period=01"`.
    pub fn parse(prime: Prime, text: &str) -> Result<Self> {
        let mut prefix = Vec::new();
        let mut period = None;
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match part.strip_prefix("period=") {
                Some(p) => period = Some(parse_digits(prime, p)?),
                None => prefix.extend(parse_digits(prime, part)?),
            }
        }
        match period {
            Some(period) => DigitStream::periodic(prime, prefix, period),
            None => DigitStream::explicit(prime, prefix),
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// `a_i` for `i ≥ 1`.
    pub fn digit(&self, i: usize) -> Result<u8> {
        assert!(i >= 1, "digits are indexed from 1");
        match &self.rule {
            Rule::Explicit(d) => d
                .get(i - 1)
                .copied()
                .ok_or_else(|| Error::invalid(format!("only {} digits are known, digit {i} requested", d.len()))),
            Rule::Periodic { prefix, period } => {
                Ok(if i <= prefix.len() { prefix[i - 1] } else { period[(i - 1 - prefix.len()) % period.len()] })
            }
        }
    }

    pub fn digits(&self, n: usize) -> Result<Vec<u8>> {
        (1..=n).map(|i| self.digit(i)).collect()
    }

    /// Some repeating digit differs from `p − 1`, so `k_n → ∞`.
    pub fn growth_certified(&self) -> bool {
        match &self.rule {
            Rule::Explicit(_) => false,
            Rule::Periodic { period, .. } => period.iter().any(|&d| u64::from(d) + 1 != self.prime.get()),
        }
    }
}

impl fmt::Display for DigitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |d: &[u8]| d.iter().map(|&x| char::from_digit(x.into(), 36).unwrap_or('?')).collect::<String>();
        match &self.rule {
            Rule::Explicit(d) => write!(f, "{}", show(d)),
            Rule::Periodic { prefix, period } if prefix.is_empty() => write!(f, "period={}", show(period)),
            Rule::Periodic { prefix, period } => write!(f, "{},period={}", show(prefix), show(period)),
        }
    }
}

/// `J_{r,s} = (r, s) ∩ X` with `r, s` of the form `m / p^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicInterval {
    #[serde(skip)]
    prime: Prime,
    r: Rational,
    s: Rational,
}

fn is_p_power(n: &BigInt, p: Prime) -> bool {
    let p = BigInt::from(p.get());
    let mut n = n.clone();
    while !n.is_one() {
        if (&n % &p).is_zero() {
            n /= &p;
        } else {
            return false;
        }
    }
    true
}

impl DyadicInterval {
    pub fn new(prime: Prime, r: Rational, s: Rational) -> Result<Self> {
        for e in [&r, &s] {
            if !is_p_power(e.denom(), prime) {
                return Err(Error::invalid(format!("endpoint {e} is not of the form m/{prime}^k")));
            }
        }
        if r.is_zero() && s.is_zero() || r == s {
            return Err(Error::invalid(format!("empty interval ({r}, {s})")));
        }
        if r.signum() < 0 || r > s || s > Rational::one() {
            return Err(Error::invalid(format!("need 0 ≤ r < s ≤ 1, got ({r}, {s})")));
        }
        Ok(DyadicInterval { prime, r, s })
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    /// `1/s − 1/r`, or `1/s` when `r = 0`.
    pub fn upsilon(&self) -> Rational {
        let inv_s = self.s.recip().expect("s > 0");
        if self.r.is_zero() {
            inv_s
        } else {
            &inv_s - &self.r.recip().expect("r ≠ 0")
        }
    }

    pub fn upsilon_norm(&self) -> UltraNorm {
        self.upsilon().abs(self.prime)
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J({}, {})", self.r, self.s)
    }
}

/// `υ` of a finite union of pairwise disjoint intervals.
pub fn upsilon_of_union(parts: &[DyadicInterval]) -> Result<Rational> {
    let mut sorted: Vec<&DyadicInterval> = parts.iter().collect();
    sorted.sort_by(|a, b| a.r.cmp(&b.r));
    for w in sorted.windows(2) {
        if w[1].r < w[0].s {
            return Err(Error::invalid(format!("{} and {} overlap", w[0], w[1])));
        }
    }
    Ok(parts.iter().fold(Rational::zero(), |acc, j| &acc + &j.upsilon()))
}

/// `R = Σ_{i≤n} a_i p^{n−i}`, so `J_n(x) = J_{R/p^n, (R+1)/p^n}`.
fn digit_numerator(x: &DigitStream, n: usize) -> Result<BigInt> {
    let p = BigInt::from(x.prime.get());
    let mut acc = BigInt::zero();
    for d in x.digits(n)? {
        acc = acc * &p + BigInt::from(d);
    }
    Ok(acc)
}

/// `J_n(x)`: the length-`p^{-n}` interval whose left end is the `n`-digit
/// truncation of `x`.
pub fn enclosing_interval(x: &DigitStream, n: usize) -> Result<DyadicInterval> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let big_r = digit_numerator(x, n)?;
    let scale = BigInt::from(x.prime.get()).pow(n as u32);
    DyadicInterval::new(x.prime, Rational::new(big_r.clone(), scale.clone())?, Rational::new(big_r + 1, scale)?)
}

/// `max{k ≤ n : a_k ≠ p − 1}`, or `None` when no such `k` exists.
pub fn digit_formula_k(x: &DigitStream, n: usize) -> Result<Option<usize>> {
    let top = (x.prime.get() - 1) as u8;
    for k in (1..=n).rev() {
        if x.digit(k)? != top {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// `n − v_p(1 + Σ_{i≤n} a_i p^{n−i})`, by exact arithmetic.
pub fn carry_formula_k(x: &DigitStream, n: usize) -> Result<i64> {
    let succ = Rational::from_integer(digit_numerator(x, n)? + 1);
    let v = succ.valuation(x.prime).finite().expect("R + 1 > 0");
    Ok(n as i64 - v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecayRow {
    pub n: usize,
    pub k: i64,
    pub upsilon: Rational,
    pub norm: UltraNorm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecayReport {
    pub rows: Vec<DecayRow>,
    /// `n` with `a_n = 0`, where the evaluation is not carried out.
    pub skipped_zero_digit: Vec<usize>,
    /// `n` with `a_1 = … = a_n = p − 1`, where the digit formula is undefined.
    pub skipped_all_top: Vec<usize>,
    /// `max |υ(J)|_p` over `J_{0,1}`, `J_{0,1/p}`, `J_{1/p,1}`: a lower bound
    /// for `‖X‖_υ`.
    pub norm_lower_bound: UltraNorm,
    pub k_nondecreasing: bool,
    pub growth_certified: bool,
    /// `|υ(J_n(x))|_p` fell below the lower bound with `k_n` non-decreasing.
    pub continuity_violated: bool,
}

impl DecayReport {
    /// Columns `n,k_n,abs`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k_n,abs\n");
        for row in &self.rows {
            let _ = writeln!(out, "{},{},{}", row.n, row.k, row.norm);
        }
        out
    }
}

/// Lower bound for `‖X‖_υ` from a few explicit intervals.
pub fn norm_lower_bound(prime: Prime) -> UltraNorm {
    let p = prime.get() as i64;
    let third = |a: i64, b: i64| Rational::new(a, b).expect("nonzero denominator");
    [(0, 1, 1, 1), (0, 1, 1, p), (1, p, 1, 1)]
        .into_iter()
        .map(|(rn, rd, sn, sd)| {
            DyadicInterval::new(prime, third(rn, rd), third(sn, sd)).expect("valid interval").upsilon_norm()
        })
        .max()
        .expect("nonempty")
}

/// `|υ(J_n(x))|_p` for `n = 1..=N` with `a_n ≠ 0`, checked against the
/// digit formula `|υ(J_n(x))|_p = p^{-k_n}`.
pub fn decay_sequence(x: &DigitStream, big_n: usize) -> Result<DecayReport> {
    if big_n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if big_n > MAX_DECAY_TERMS {
        return Err(Error::resource("decay terms", big_n as u128, MAX_DECAY_TERMS as u128));
    }
    let mut rows = Vec::new();
    let mut skipped_zero_digit = Vec::new();
    let mut skipped_all_top = Vec::new();
    for n in 1..=big_n {
        if x.digit(n)? == 0 {
            skipped_zero_digit.push(n);
            continue;
        }
        let Some(k) = digit_formula_k(x, n)? else {
            skipped_all_top.push(n);
            continue;
        };
        let upsilon = enclosing_interval(x, n)?.upsilon();
        let norm = upsilon.abs(x.prime);
        let expected = UltraNorm::power(x.prime, k as i64);
        if norm != expected || carry_formula_k(x, n)? != k as i64 {
            return Err(Error::Internal(format!("n = {n}: |υ(J_n)| = {norm} but the digit formula gives {expected}")));
        }
        rows.push(DecayRow { n, k: k as i64, upsilon, norm });
    }
    let lower = norm_lower_bound(x.prime);
    let k_nondecreasing = rows.windows(2).all(|w| w[0].k <= w[1].k);
    let continuity_violated = k_nondecreasing && rows.last().is_some_and(|r| r.norm < lower);
    Ok(DecayReport {
        rows,
        skipped_zero_digit,
        skipped_all_top,
        norm_lower_bound: lower,
        k_nondecreasing,
        growth_certified: x.growth_certified(),
        continuity_violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use proptest::prelude::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn interval(prime: u64, r: &str, s: &str) -> DyadicInterval {
        DyadicInterval::new(p(prime), q(r), q(s)).unwrap()
    }

    #[test]
    fn upsilon_examples() {
        assert_eq!(interval(2, "0", "1/2").upsilon(), q("2"));
        assert_eq!(interval(2, "1/2", "1").upsilon(), q("-1"));
        assert_eq!(interval(2, "0", "1").upsilon(), q("1"));
        let parts = [interval(2, "0", "1/2"), interval(2, "1/2", "1")];
        assert_eq!(upsilon_of_union(&parts).unwrap(), q("1"));
        let overlapping = [interval(2, "0", "3/4"), interval(2, "1/2", "1")];
        assert!(upsilon_of_union(&overlapping).is_err());
        assert!(DyadicInterval::new(p(2), q("1/2"), q("1/2")).is_err());
        assert!(DyadicInterval::new(p(2), q("1/3"), q("1/2")).is_err());
        assert!(DyadicInterval::new(p(2), q("1/2"), q("1/4")).is_err());
    }

    #[test]
    fn enclosing_interval_examples() {
        let x = DigitStream::parse(p(2), "period=01").unwrap();
        let j = enclosing_interval(&x, 2).unwrap();
        assert_eq!((j.r(), j.s()), (&q("1/4"), &q("1/2")));
        let j = enclosing_interval(&x, 1).unwrap();
        assert_eq!((j.r(), j.s()), (&q("0"), &q("1/2")));
        let y = DigitStream::parse(p(2), "101,period=01").unwrap();
        let j = enclosing_interval(&y, 3).unwrap();
        assert_eq!((j.r(), j.s()), (&q("5/8"), &q("6/8")));
    }

    #[test]
    fn decay_examples() {
        let x = DigitStream::parse(p(2), "period=01").unwrap();
        let rep = decay_sequence(&x, 4).unwrap();
        let row = rep.rows.iter().find(|r| r.n == 4).unwrap();
        assert_eq!(row.k, 3);
        assert_eq!(row.norm, UltraNorm::power(p(2), 3));
        assert_eq!(row.upsilon, q("16/6") - q("16/5"));
        assert_eq!(rep.skipped_zero_digit, vec![1, 3]);

        // p = 3, period 012, n = 3: a_3 = p − 1, so k_3 = 2
        let y = DigitStream::parse(p(3), "period=012").unwrap();
        let rep = decay_sequence(&y, 3).unwrap();
        let row = rep.rows.iter().find(|r| r.n == 3).unwrap();
        assert_eq!(row.upsilon, q("-9/10"));
        assert_eq!(row.k, 2);
        assert_eq!(row.norm, UltraNorm::power(p(3), 2));
    }

    #[test]
    fn eventually_constant_streams_are_rejected() {
        assert!(DigitStream::parse(p(2), "1,period=0").is_err());
        assert!(DigitStream::parse(p(2), "period=11").is_err());
        assert!(DigitStream::parse(p(2), "12").is_err());
        assert!(DigitStream::parse(p(2), "period=").is_err());
    }

    #[test]
    fn all_top_prefix_is_logged() {
        let x = DigitStream::parse(p(2), "11,period=01").unwrap();
        let rep = decay_sequence(&x, 6).unwrap();
        assert_eq!(rep.skipped_all_top, vec![1, 2]);
        assert_eq!(rep.skipped_zero_digit, vec![3, 5]);
        assert_eq!(rep.rows.iter().map(|r| (r.n, r.k)).collect::<Vec<_>>(), vec![(4, 3), (6, 5)]);
    }

    #[test]
    fn continuity_fails_for_periodic_points() {
        for (prime, text) in [(2, "period=01"), (3, "period=012"), (5, "2,period=41"), (2, "period=0011")] {
            let x = DigitStream::parse(p(prime), text).unwrap();
            let rep = decay_sequence(&x, 30).unwrap();
            assert_eq!(rep.norm_lower_bound, UltraNorm::one(p(prime)));
            assert!(rep.growth_certified && rep.k_nondecreasing && rep.continuity_violated, "{text}");
            assert!(rep.rows.last().unwrap().k >= 30 - 4);
        }
        let csv = decay_sequence(&DigitStream::parse(p(2), "period=01").unwrap(), 4).unwrap().to_csv();
        assert_eq!(csv, "n,k_n,abs\n2,1,2^-1\n4,3,2^-3\n");
    }

    fn dyadic(prime: u64, num: u64, k: u32) -> Rational {
        Rational::new(num, prime.pow(k)).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn upsilon_is_additive(prime in prop::sample::select(vec![2u64, 3, 5]), k in 1u32..8, a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let top = prime.pow(k);
            let mut pts = [a % (top + 1), b % (top + 1), c % (top + 1)];
            pts.sort_unstable();
            prop_assume!(pts[0] < pts[1] && pts[1] < pts[2]);
            let [r, s, t] = pts.map(|n| dyadic(prime, n, k));
            let j = |x: &Rational, y: &Rational| DyadicInterval::new(p(prime), x.clone(), y.clone()).unwrap().upsilon();
            prop_assert_eq!(&j(&r, &s) + &j(&s, &t), j(&r, &t));
        }

        #[test]
        fn upsilon_is_bounded(prime in prop::sample::select(vec![2u64, 3, 5]), k in 1u32..10, a in any::<u64>(), b in any::<u64>()) {
            let top = prime.pow(k);
            let (lo, hi) = ((a % (top + 1)).min(b % (top + 1)), (a % (top + 1)).max(b % (top + 1)));
            prop_assume!(lo < hi);
            let j = DyadicInterval::new(p(prime), dyadic(prime, lo, k), dyadic(prime, hi, k)).unwrap();
            prop_assert!(j.upsilon_norm() <= UltraNorm::one(p(prime)));
        }

        #[test]
        fn digit_formula_matches_carry(prime in prop::sample::select(vec![2u64, 3, 5, 7]), digits in prop::collection::vec(any::<u8>(), 30)) {
            let digits: Vec<u8> = digits.iter().map(|d| d % prime as u8).collect();
            let x = DigitStream::explicit(p(prime), digits).unwrap();
            for n in 1..=30 {
                match digit_formula_k(&x, n).unwrap() {
                    Some(k) => prop_assert_eq!(carry_formula_k(&x, n).unwrap(), k as i64),
                    None => prop_assert_eq!(carry_formula_k(&x, n).unwrap(), 0),
                }
            }
        }
    }
}

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::{Serialize, Serializer};

use super::partition::{Cover, Partition};
use super::value::{approx_cmp, to_decimal, tolerance, EntropyValue, DISPLAY_DIGITS};
use crate::arith::UltraNorm;
use crate::error::{Error, Result};
use crate::measure::MeasureContext;
use crate::report::{Check, Report};
use crate::shift::all_cylinders;
use crate::transform::Transformation;

/// Cylinder depth enumerated when testing the unit-norm condition.
const MAX_UNIT_NORM_DEPTH: u32 = 8;

/// `H_μ(α) = min_{‖A‖>0} ‖A‖ · log2 M(α)` where `M(α)` counts the cells of
/// positive norm. An empty significant part gives 0.
pub fn measure_entropy(m: &MeasureContext, alpha: &Partition) -> Result<EntropyValue> {
    let mut significant = 0u64;
    let mut smallest: Option<UltraNorm> = None;
    for cell in alpha.cells() {
        let norm = m.norm_of(cell)?;
        if norm.is_zero() {
            continue;
        }
        significant += 1;
        smallest = Some(match smallest {
            Some(s) if s <= norm => s,
            _ => norm,
        });
    }
    Ok(EntropyValue::measure(smallest.unwrap_or(UltraNorm::Zero), significant))
}

/// `a_1, …, a_N` for some `n`-fold join, with the alphabet size kept for the
/// growth test of the limit estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropySequence {
    growth_base: u32,
    terms: Vec<EntropyValue>,
}

impl EntropySequence {
    pub fn new(growth_base: u32, terms: Vec<EntropyValue>) -> Self {
        EntropySequence { growth_base, terms }
    }

    pub fn growth_base(&self) -> u32 {
        self.growth_base
    }

    pub fn terms(&self) -> &[EntropyValue] {
        &self.terms
    }

    /// `a_n` for 1-based `n`.
    pub fn term(&self, n: usize) -> &EntropyValue {
        &self.terms[n - 1]
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `a_n / n`.
    pub fn ratio(&self, n: usize) -> BigRational {
        self.term(n).approx() / BigRational::from_integer(n.into())
    }

    /// First `(n, m)` with `a_{n+m} > a_n + a_m`.
    pub fn subadditivity_witness(&self) -> Option<(usize, usize)> {
        let len = self.terms.len();
        for n in 1..len {
            for m in n..=len - n {
                if !subadditive_at(self.term(n), self.term(m), self.term(n + m)) {
                    return Some((n, m));
                }
            }
        }
        None
    }

    /// Columns `n,e_n,M_n,a_n_decimal,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,e_n,M_n,a_n_decimal,ratio\n");
        for n in 1..=self.len() {
            let a = self.term(n);
            let e = a.exponent().map_or("inf".into(), |e| e.to_string());
            let _ =
                writeln!(out, "{n},{e},{},{},{}", a.count(), a.decimal(), to_decimal(&self.ratio(n), DISPLAY_DIGITS));
        }
        out
    }
}

impl Serialize for EntropySequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            n: usize,
            value: &'a EntropyValue,
            ratio: String,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            growth_base: u32,
            terms: Vec<Row<'a>>,
        }
        Repr {
            growth_base: self.growth_base,
            terms: (1..=self.len())
                .map(|n| Row { n, value: self.term(n), ratio: to_decimal(&self.ratio(n), DISPLAY_DIGITS) })
                .collect(),
        }
        .serialize(serializer)
    }
}

/// `c ≤ a + b`, exactly when all three share a weight.
fn subadditive_at(a: &EntropyValue, b: &EntropyValue, c: &EntropyValue) -> bool {
    if c.is_zero() {
        return true;
    }
    let nonzero: Vec<&EntropyValue> = [a, b].into_iter().filter(|v| !v.is_zero()).collect();
    match nonzero.as_slice() {
        [] => false,
        [x] if x.exact_cmp(c).is_some() => x.exact_cmp(c) != Some(Ordering::Less),
        [x, y] if x.exact_cmp(c).is_some() && y.exact_cmp(c).is_some() && x.exact_cmp(y).is_some() => {
            // equal weights: M_c ≤ M_a · M_b
            c.count() <= &(x.count() * y.count())
        }
        _ => c.approx() <= a.approx() + b.approx() + tolerance(),
    }
}

fn verify_subadditive(seq: &EntropySequence) -> Result<()> {
    match seq.subadditivity_witness() {
        Some((n, m)) => Err(Error::Verification(format!(
            "a_{} = {} exceeds a_{n} + a_{m} = {} + {}",
            n + m,
            seq.term(n + m),
            seq.term(n),
            seq.term(m)
        ))),
        None => Ok(()),
    }
}

/// `a_n = H_μ(α ∨ T⁻¹α ∨ … ∨ T^{-(n-1)}α)` for `n = 1..=N`; subadditivity
/// is verified on every computed pair.
pub fn measure_entropy_sequence(
    m: &MeasureContext,
    t: &Transformation,
    alpha: &Partition,
    n: u32,
) -> Result<EntropySequence> {
    let terms = alpha.dynamical_joins(t, n)?.iter().map(|j| measure_entropy(m, j)).collect::<Result<Vec<_>>>()?;
    let seq = EntropySequence::new(alpha.alphabet().size(), terms);
    verify_subadditive(&seq)?;
    Ok(seq)
}

/// `b_n = log2 N(𝒰 ∨ T⁻¹𝒰 ∨ … ∨ T^{-(n-1)}𝒰)` for `n = 1..=N`.
pub fn topological_entropy_sequence(t: &Transformation, cover: &Cover, n: u32) -> Result<EntropySequence> {
    let terms = cover
        .dynamical_joins(t, n)?
        .iter()
        .map(|j| Ok(EntropyValue::topological(j.min_subcover_size()? as u64)))
        .collect::<Result<Vec<_>>>()?;
    let seq = EntropySequence::new(cover.alphabet().size(), terms);
    verify_subadditive(&seq)?;
    Ok(seq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitClass {
    /// `a_n / n` is constant on the last three terms.
    Exact,
    /// The norm exponent grows linearly while `M_n ≤ p^n`, so `a_n / n → 0`.
    ExtrapolatedZero,
    /// Only `0 ≤ h ≤ upper` is known.
    Bracket,
}

/// Limit estimate for a subadditive sequence: `lim a_n/n = inf a_n/n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeketeEstimate {
    /// `min_n a_n / n`, an upper bound for the limit.
    pub upper: BigRational,
    /// The `n` attaining `upper` (smallest such).
    pub upper_at: usize,
    pub last_ratio: BigRational,
    pub classification: LimitClass,
    /// The limit when it is determined.
    pub limit: Option<BigRational>,
    /// A lower bound for the limit.
    pub lower: BigRational,
}

impl Serialize for FeketeEstimate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            upper: String,
            upper_at: usize,
            last_ratio: String,
            classification: LimitClass,
            limit: Option<String>,
            lower: String,
        }
        let d = |r: &BigRational| to_decimal(r, DISPLAY_DIGITS);
        Repr {
            upper: d(&self.upper),
            upper_at: self.upper_at,
            last_ratio: d(&self.last_ratio),
            classification: self.classification,
            limit: self.limit.as_ref().map(d),
            lower: d(&self.lower),
        }
        .serialize(serializer)
    }
}

pub fn fekete_estimate(seq: &EntropySequence) -> Result<FeketeEstimate> {
    if seq.is_empty() {
        return Err(Error::invalid("the sequence is empty"));
    }
    if let Some((n, m)) = seq.subadditivity_witness() {
        return Err(Error::invalid(format!("the sequence is not subadditive: a_{} > a_{n} + a_{m}", n + m)));
    }
    let len = seq.len();
    let mut upper_at = 1;
    for n in 2..=len {
        if approx_cmp(&seq.ratio(n), &seq.ratio(upper_at)) == Ordering::Less {
            upper_at = n;
        }
    }
    let upper = seq.ratio(upper_at);
    let last_ratio = seq.ratio(len);
    let zero = BigRational::zero();
    let (classification, limit) =
        if len >= 3 && (len - 2..len).all(|n| seq.term(n).ratio_eq(n as u32, seq.term(n + 1), n as u32 + 1)) {
            (LimitClass::Exact, Some(last_ratio.clone()))
        } else if len >= 3 && extrapolates_to_zero(seq) {
            (LimitClass::ExtrapolatedZero, Some(zero.clone()))
        } else {
            (LimitClass::Bracket, None)
        };
    let lower = limit.clone().unwrap_or(zero);
    Ok(FeketeEstimate { upper, upper_at, last_ratio, classification, limit, lower })
}

/// `e_n` strictly increasing on the last three terms, `e_n ≥ c·n` with
/// `c = min e_n/n > 0`, and `M_n ≤ p^n` throughout.
fn extrapolates_to_zero(seq: &EntropySequence) -> bool {
    let len = seq.len();
    let Some(exps) = seq.terms().iter().map(EntropyValue::exponent).collect::<Option<Vec<i64>>>() else {
        return false;
    };
    let tail_increasing = exps[len - 3..].windows(2).all(|w| w[0] < w[1]);
    let linear = exps.iter().all(|&e| e > 0);
    let base = BigUint::from(seq.growth_base());
    let bounded = (1..=len).all(|n| seq.term(n).count() <= &Pow::pow(&base, n));
    tail_increasing && linear && bounded
}

/// Measure and topological sequences on the same partition, with the
/// comparison `a_n ≤ b_n` and, under unit norms, `a_n = b_n`.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyComparison {
    pub measure: EntropySequence,
    pub topological: EntropySequence,
    pub unit_norm: bool,
    pub report: Report,
}

pub fn compare_entropies(
    m: &MeasureContext,
    t: &Transformation,
    alpha: &Partition,
    n: u32,
) -> Result<EntropyComparison> {
    let measure = measure_entropy_sequence(m, t, alpha, n)?;
    let topological = topological_entropy_sequence(t, &alpha.to_cover(), n)?;

    let depth = n.min(MAX_UNIT_NORM_DEPTH);
    let mut unit_norm = true;
    for c in all_cylinders(m.alphabet(), depth)? {
        if !m.norm_of(&c)?.is_one() {
            unit_norm = false;
            break;
        }
    }
    if unit_norm != m.is_unit_norm() {
        return Err(Error::Internal(format!("cylinder norms to depth {depth} disagree with the weight valuations")));
    }

    let mut report = Report::default();
    let mut below = Check::new("measure-below-topological");
    for k in 1..=measure.len() {
        let (a, b) = (measure.term(k), topological.term(k));
        below.record(a.compare(b) != Ordering::Greater, || format!("n = {k}: a_n = {a} > b_n = {b}"));
    }
    report.push(below);
    if unit_norm {
        let mut equal = Check::new("equal-under-unit-norm");
        for k in 1..=measure.len() {
            let (a, b) = (measure.term(k), topological.term(k));
            equal.record(a.compare(b) == Ordering::Equal, || format!("n = {k}: a_n = {a} ≠ b_n = {b}"));
        }
        report.push(equal);
    } else {
        report.note("some cylinder has norm below 1, so only a_n ≤ b_n is asserted");
    }
    Ok(EntropyComparison { measure, topological, unit_norm, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Prime;
    use crate::entropy::partition::random_partition;
    use crate::shift::Alphabet;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example() -> MeasureContext {
        MeasureContext::bernoulli(3, 5, &["-2", "-2", "5"]).unwrap()
    }

    fn a(p: u32) -> Alphabet {
        Alphabet::new(p).unwrap()
    }

    fn five(e: i64) -> UltraNorm {
        UltraNorm::power(Prime::new(5).unwrap(), e)
    }

    #[test]
    fn single_partition_entropies() {
        let m = example();
        let alpha = Partition::cylinders(a(3), 1).unwrap();
        assert_eq!(measure_entropy(&m, &alpha).unwrap(), EntropyValue::measure(five(1), 3u32));
        let beta = Partition::parse(a(3), "U:0|U:1+U:2").unwrap();
        let h = measure_entropy(&m, &beta).unwrap();
        assert_eq!(h, EntropyValue::measure(five(0), 2u32));
        assert_eq!(h.decimal(), "1");
        assert!(measure_entropy(&m, &Partition::trivial(a(3))).unwrap().is_zero());
    }

    #[test]
    fn generating_partition_sequence() {
        let m = example();
        let shift = Transformation::shift(a(3));
        let alpha = Partition::cylinders(a(3), 1).unwrap();
        let seq = measure_entropy_sequence(&m, &shift, &alpha, 6).unwrap();
        for n in 1..=6usize {
            assert_eq!(seq.term(n).exponent(), Some(n as i64));
            assert_eq!(seq.term(n).count(), &BigUint::from(3u32).pow(n as u32));
        }
        let est = fekete_estimate(&seq).unwrap();
        assert_eq!(est.classification, LimitClass::ExtrapolatedZero);
        assert_eq!(est.limit, Some(BigRational::zero()));
        assert_eq!(est.upper_at, 6);
    }

    #[test]
    fn coarse_partition_sequence_is_exact() {
        let m = example();
        let shift = Transformation::shift(a(3));
        let beta = Partition::parse(a(3), "U:0|U:1+U:2").unwrap();
        let seq = measure_entropy_sequence(&m, &shift, &beta, 8).unwrap();
        for n in 1..=8usize {
            assert_eq!(seq.term(n), &EntropyValue::measure(five(0), BigUint::from(2u32).pow(n as u32)));
            assert_eq!(seq.term(n).approx(), BigRational::from_integer(n.into()));
        }
        let est = fekete_estimate(&seq).unwrap();
        assert_eq!(est.classification, LimitClass::Exact);
        assert_eq!(est.limit, Some(BigRational::from_integer(1.into())));
    }

    #[test]
    fn trivial_partition_has_zero_entropy() {
        let shift = Transformation::shift(a(3));
        let seq = measure_entropy_sequence(&example(), &shift, &Partition::trivial(a(3)), 4).unwrap();
        assert!(seq.terms().iter().all(EntropyValue::is_zero));
        let top = topological_entropy_sequence(&shift, &Partition::trivial(a(3)).to_cover(), 4).unwrap();
        assert!(top.terms().iter().all(EntropyValue::is_zero));
        assert_eq!(fekete_estimate(&seq).unwrap().classification, LimitClass::Exact);
    }

    #[test]
    fn bracket_for_shifted_linear_growth() {
        let terms = (1..=6u32).map(|n| EntropyValue::topological(BigUint::from(2u32).pow(n + 1))).collect();
        let seq = EntropySequence::new(2, terms);
        let est = fekete_estimate(&seq).unwrap();
        assert_eq!(est.classification, LimitClass::Bracket);
        assert_eq!(est.upper_at, 6);
        assert_eq!(est.upper, BigRational::new(7.into(), 6.into()));
        assert_eq!(est.lower, BigRational::zero());
    }

    #[test]
    fn non_subadditive_input_is_rejected_with_witness() {
        let terms = [1u32, 8, 8].iter().map(|&c| EntropyValue::topological(c)).collect();
        let err = fekete_estimate(&EntropySequence::new(2, terms)).unwrap_err();
        assert!(err.to_string().contains("a_2 > a_1 + a_1"), "{err}");
    }

    #[test]
    fn topological_examples() {
        let shift = Transformation::shift(a(3));
        let alpha = Partition::cylinders(a(3), 1).unwrap().to_cover();
        let top = topological_entropy_sequence(&shift, &alpha, 5).unwrap();
        for n in 1..=5usize {
            assert_eq!(top.term(n), &EntropyValue::topological(BigUint::from(3u32).pow(n as u32)));
        }
        let est = fekete_estimate(&top).unwrap();
        assert_eq!(est.classification, LimitClass::Exact);
        assert_eq!(to_decimal(est.limit.as_ref().unwrap(), 20), "1.5849625007211561815");
        let pairs = Cover::parse(a(3), "U:0+U:1|U:1+U:2|U:2+U:0").unwrap();
        let b = topological_entropy_sequence(&shift, &pairs, 1).unwrap();
        assert_eq!(b.term(1).approx(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn comparison_unit_norm_case() {
        let m = MeasureContext::bernoulli(2, 5, &["-2", "3"]).unwrap();
        let shift = Transformation::shift(a(2));
        let cmp = compare_entropies(&m, &shift, &Partition::cylinders(a(2), 1).unwrap(), 6).unwrap();
        assert!(cmp.unit_norm);
        assert!(cmp.report.passed(), "{:?}", cmp.report.first_failure());
        for n in 1..=6usize {
            assert_eq!(cmp.measure.term(n).approx(), BigRational::from_integer(n.into()));
        }
        assert_eq!(fekete_estimate(&cmp.topological).unwrap().limit, Some(BigRational::from_integer(1.into())));
    }

    #[test]
    fn comparison_strict_case() {
        let shift = Transformation::shift(a(3));
        let cmp = compare_entropies(&example(), &shift, &Partition::cylinders(a(3), 1).unwrap(), 6).unwrap();
        assert!(!cmp.unit_norm);
        assert!(cmp.report.passed());
        for n in 1..=6usize {
            assert_eq!(cmp.measure.term(n).compare(cmp.topological.term(n)), Ordering::Less);
        }
        let trivial = compare_entropies(&example(), &shift, &Partition::trivial(a(3)), 3).unwrap();
        assert!(trivial.report.passed());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn significant_count_is_submultiplicative(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = example();
            let x = random_partition(a(3), &mut rng, 3, 3).unwrap();
            let y = random_partition(a(3), &mut rng, 3, 3).unwrap();
            let hx = measure_entropy(&m, &x).unwrap();
            let hy = measure_entropy(&m, &y).unwrap();
            let hxy = measure_entropy(&m, &x.join(&y).unwrap()).unwrap();
            prop_assert!(hxy.count() <= &(hx.count() * hy.count()));
        }

        #[test]
        fn entropy_is_invariant_under_preimage(seed in any::<u64>(), which in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (m, t) = match which {
                0 => (example(), Transformation::shift(a(3))),
                1 => (example(), Transformation::swap(a(3))),
                _ => (MeasureContext::haar(2, 3).unwrap(), Transformation::odometer(a(2))),
            };
            let alpha = random_partition(m.alphabet(), &mut rng, 3, 4).unwrap();
            let pulled = alpha.preimage(&t).unwrap();
            for cell in alpha.cells() {
                prop_assert_eq!(m.norm_of(&t.preimage(cell).unwrap()).unwrap(), m.norm_of(cell).unwrap());
            }
            prop_assert_eq!(measure_entropy(&m, &pulled).unwrap(), measure_entropy(&m, &alpha).unwrap());
        }

        #[test]
        fn entropy_sequences_are_conjugacy_invariant(seed in any::<u64>(), p in 2u32..=3) {
            // the swap of 0 and 1 commutes with the shift and fixes these weights
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = if p == 2 {
                MeasureContext::bernoulli(2, 3, &["1/2", "1/2"]).unwrap()
            } else {
                example()
            };
            let (shift, phi) = (Transformation::shift(a(p)), Transformation::swap(a(p)));
            let alpha = random_partition(a(p), &mut rng, 3, 4 - p).unwrap();
            let n = 6 - p;
            let direct = measure_entropy_sequence(&m, &shift, &alpha, n).unwrap();
            let moved = measure_entropy_sequence(&m, &shift, &alpha.image(&phi).unwrap(), n).unwrap();
            prop_assert_eq!(direct, moved);
        }
    }

    #[test]
    fn csv_rows() {
        let shift = Transformation::shift(a(3));
        let alpha = Partition::cylinders(a(3), 1).unwrap();
        let seq = measure_entropy_sequence(&example(), &shift, &alpha, 2).unwrap();
        let csv = seq.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,e_n,M_n,a_n_decimal,ratio");
        assert!(lines[1].starts_with("1,1,3,0.3169925001442312362907477887895633017519628815385,"));
        assert!(lines[2].starts_with("2,2,9,0.1267970000576924945162991155158253207007851526154,"));
    }
}

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::NormOracle;
use super::Outcome;
use crate::arith::{Prime, Rational, UltraNorm};
use crate::entropy::{
    compare_entropies, fekete_estimate, measure_entropy_sequence, EntropyValue, LimitClass, Partition,
};
use crate::error::Result;
use crate::integrate::{check_spectral_conditions, LinearOnSteps, StepFunction};
use crate::measure::MeasureContext;
use crate::pathology::{decay_sequence, digit_formula_k, enclosing_interval, DigitStream};
use crate::report::Check;
use crate::shift::{all_cylinders, parse_set_expr, Alphabet, ClopenSet, PointWord, Word};
use crate::transform::{
    check_conjugacy, check_iso_of_systems, iso_from_permutation, point_map_from_iso, Transformation,
};

fn alphabet(p: u32) -> Alphabet {
    Alphabet::new(p).expect("small alphabet")
}

fn prime(n: u64) -> Prime {
    Prime::new(n).expect("prime")
}

/// `‖U_ω‖ = 3^{-#1s in ω}` for `q = (−2, 3)`, `ℓ = 3`, all `1 ≤ |ω| ≤ 8`.
pub fn cylinder_norm_formula(_seed: u64) -> Result<Outcome> {
    let m = MeasureContext::bernoulli(2, 3, &["-2", "3"])?;
    let mut check = Check::new("cylinder-norm");
    for c in all_cylinders(alphabet(2), 8)? {
        if c.depth() == 0 {
            continue; // the empty word
        }
        let word = c.as_cylinder().expect("cylinder");
        let ones = word.symbols().iter().filter(|&&s| s == 1).count() as i64;
        let norm = m.norm_of(&c)?;
        check.record(norm == UltraNorm::power(prime(3), ones), || format!("‖U:{word}‖ = {norm}"));
    }
    Ok(Outcome::from_check(&check, format!("{} words", check.cases)))
}

fn example_a() -> Result<MeasureContext> {
    MeasureContext::bernoulli(3, 5, &["-2", "-2", "5"])
}

/// Generating partition: `e_n = n`, `M_n = 3^n`, limit extrapolated to 0.
pub fn entropy_generating_partition(_seed: u64) -> Result<Outcome> {
    let m = example_a()?;
    let alpha = Partition::cylinders(alphabet(3), 1)?;
    let seq = measure_entropy_sequence(&m, &Transformation::shift(alphabet(3)), &alpha, 6)?;
    let mut check = Check::new("terms");
    for n in 1..=6usize {
        let want = EntropyValue::measure(UltraNorm::power(prime(5), n as i64), BigUint::from(3u32).pow(n as u32));
        let got = seq.term(n);
        check.record(got == &want, || format!("a_{n} = {got}, expected {want}"));
    }
    let est = fekete_estimate(&seq)?;
    let ok = check.passed() && est.classification == LimitClass::ExtrapolatedZero;
    Ok(Outcome::new(ok, format!("a_6 = {}, classification {:?}", seq.term(6), est.classification)))
}

/// Coarse partition: `a_n = n` exactly and `h = 1` exactly, which exceeds
/// the generating partition's `h = 0`.
pub fn entropy_coarse_partition(_seed: u64) -> Result<Outcome> {
    let m = example_a()?;
    let shift = Transformation::shift(alphabet(3));
    let beta = Partition::parse(alphabet(3), "U:0|U:1+U:2")?;
    let seq = measure_entropy_sequence(&m, &shift, &beta, 8)?;
    let mut check = Check::new("terms");
    for n in 1..=8usize {
        let got = seq.term(n);
        let exact = got.exponent() == Some(0) && got.count() == &BigUint::from(2u32).pow(n as u32);
        let value = got.approx() == BigRational::from_integer(n.into());
        check.record(exact && value, || format!("a_{n} = {got}"));
    }
    let est_beta = fekete_estimate(&seq)?;
    let alpha = Partition::cylinders(alphabet(3), 1)?;
    let est_alpha = fekete_estimate(&measure_entropy_sequence(&m, &shift, &alpha, 6)?)?;
    let one = BigRational::from_integer(1.into());
    let exact = est_beta.classification == LimitClass::Exact && est_beta.limit.as_ref() == Some(&one);
    let witness = match (&est_beta.limit, &est_alpha.limit) {
        (Some(hb), Some(ha)) => hb > ha,
        _ => false,
    };
    Ok(Outcome::new(
        check.passed() && exact && witness,
        format!(
            "h(β) = {} ({:?}), h(α) = {} ({:?})",
            est_beta.limit.as_ref().map_or("?".into(), |v| v.to_string()),
            est_beta.classification,
            est_alpha.limit.as_ref().map_or("?".into(), |v| v.to_string()),
            est_alpha.classification
        ),
    ))
}

/// `μ(σ⁻¹A) = μ(A)` on all cylinders to depth 6 and 200 random clopens.
pub fn shift_invariance(seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut check = Check::new("shift-invariance");
    for m in [MeasureContext::bernoulli(2, 3, &["-2", "3"])?, example_a()?] {
        let a = m.alphabet();
        let shift = Transformation::shift(a);
        let mut sets = all_cylinders(a, 6)?;
        for _ in 0..200 {
            let depth = rng.gen_range(0..=6);
            sets.push(ClopenSet::random(a, depth, &mut rng)?);
        }
        for set in &sets {
            let (before, after) = (m.measure_of(set)?, m.measure_of(&shift.preimage(set)?)?);
            check.record(before == after, || format!("p = {}: μ({set}) = {before}, μ(σ⁻¹·) = {after}", a.size()));
        }
    }
    Ok(Outcome::from_check(&check, format!("{} sets", check.cases)))
}

/// `N(1·0^∞) = 3^{-1}`, `N(0^∞) = 1`, `N((01)^∞) = 0`.
pub fn negligible_points(_seed: u64) -> Result<Outcome> {
    let m = MeasureContext::bernoulli(2, 3, &["-2", "3"])?;
    let a = alphabet(2);
    let w = PointWord::parse(a, "1:0")?;
    let nw = m.point_norm(&w)?;
    let nsw = m.point_norm(&w.shift())?;
    let nper = m.point_norm(&PointWord::parse(a, ":01")?)?;
    let three = prime(3);
    let ratio = nsw.to_rational() / nw.to_rational();
    let ok = nw == UltraNorm::power(three, 1)
        && nsw == UltraNorm::one(three)
        && ratio == BigRational::from_integer(3.into())
        && nper.is_zero();
    Ok(Outcome::new(ok, format!("N(1·0^∞) = {nw}, N(0^∞) = {nsw}, ratio {ratio}, N((01)^∞) = {nper}")))
}

/// `a_n ≤ b_n` for the example measures; equality and `h = 1` for unit norms.
pub fn measure_below_topological(_seed: u64) -> Result<Outcome> {
    let mut check = Check::new("comparison");
    for m in [MeasureContext::bernoulli(2, 3, &["-2", "3"])?, example_a()?] {
        let a = m.alphabet();
        let cmp = compare_entropies(&m, &Transformation::shift(a), &Partition::cylinders(a, 1)?, 6)?;
        check.record(cmp.report.passed() && !cmp.unit_norm, || {
            format!("p = {}: {:?}", a.size(), cmp.report.first_failure())
        });
    }
    let unit = MeasureContext::bernoulli(2, 5, &["-2", "3"])?;
    let a = alphabet(2);
    let cmp = compare_entropies(&unit, &Transformation::shift(a), &Partition::cylinders(a, 1)?, 6)?;
    let equal = (1..=6usize).all(|n| {
        let want = BigRational::from_integer(n.into());
        cmp.measure.term(n).approx() == want && cmp.topological.term(n).approx() == want
    });
    let one = Some(BigRational::from_integer(1.into()));
    let limits = fekete_estimate(&cmp.measure)?.limit == one && fekete_estimate(&cmp.topological)?.limit == one;
    check.record(cmp.unit_norm && cmp.report.passed() && equal && limits, || "unit-norm case".into());
    Ok(Outcome::from_check(&check, "two strict cases and the unit-norm case".into()))
}

/// `|υ(J_n(x))|_p = p^{-k_n}` for `n ≤ 30`, with norms strictly decreasing
/// from each admissible `n` to every admissible `n' ≥ n + period`.
pub fn pathology_decay(_seed: u64) -> Result<Outcome> {
    let mut check = Check::new("decay");
    let mut rows = 0;
    for (p, period) in [(2u64, "01"), (3, "012")] {
        let x = DigitStream::parse(prime(p), &format!("period={period}"))?;
        let report = decay_sequence(&x, 30)?;
        for row in &report.rows {
            // exact evaluation against the digit formula, recomputed here
            let norm = enclosing_interval(&x, row.n)?.upsilon_norm();
            let k = digit_formula_k(&x, row.n)?.map(|k| k as i64);
            check.record(k == Some(row.k) && norm == UltraNorm::power(prime(p), row.k), || {
                format!("p = {p}, n = {}: |υ| = {norm}, k_n = {k:?}", row.n)
            });
        }
        let window = period.len();
        for (i, early) in report.rows.iter().enumerate() {
            for late in report.rows[i + 1..].iter() {
                let ok = late.norm <= early.norm && (late.n < early.n + window || late.norm < early.norm);
                check.record(ok, || {
                    format!("p = {p}: |υ(J_{})| = {} vs |υ(J_{})| = {}", early.n, early.norm, late.n, late.norm)
                });
            }
        }
        check.record(report.continuity_violated && report.growth_certified, || format!("p = {p}: no violation"));
        rows += report.rows.len();
    }
    Ok(Outcome::from_check(&check, format!("{rows} admissible n")))
}

/// Closed-form norms against brute-force sub-union sups at depth 7, for
/// every clopen set of depth ≤ 4 over two symbols.
pub fn norm_oracle(_seed: u64) -> Result<Outcome> {
    let a = alphabet(2);
    let mut check = Check::new("oracle");
    for (weights, ell) in [(["-2", "3"], 3u64), (["4", "-3"], 2)] {
        let m = MeasureContext::bernoulli(2, ell, &weights)?;
        let raw: Vec<BigRational> = weights.iter().map(|w| w.parse().expect("rational literal")).collect();
        let oracle = NormOracle::new(&raw, prime(ell), 7)?;
        for mask in 0u32..1 << 16 {
            let set = ClopenSet::from_indices(a, 4, (0..16u64).filter(|i| mask >> i & 1 == 1))?;
            let words = set.refine_to_depth(7)?;
            let (closed, brute) = (m.norm_of(&set)?, oracle.sup_norm(&words)?);
            check.record(closed == brute, || format!("ℓ = {ell}, {set}: {closed} vs {brute}"));
        }
    }
    Ok(Outcome::from_check(&check, format!("{} sets", check.cases)))
}

/// Swap on two symbols with `q = (1/2, 1/2)`, `ℓ = 3`: isomorphy, conjugacy
/// and point recovery.
pub fn iso_conjugacy_round_trip(_seed: u64) -> Result<Outcome> {
    let a = alphabet(2);
    let m = MeasureContext::bernoulli(2, 3, &["1/2", "1/2"])?;
    let (shift, swap) = (Transformation::shift(a), Transformation::swap(a));
    let systems = check_iso_of_systems(&swap, &shift, &shift, &m, &m, 4)?;
    let iso = iso_from_permutation(a, &[1, 0], 5)?;
    let conj = check_conjugacy(&iso, &shift, &shift, 4)?;
    let mut points = Check::new("point-map");
    for i in 0..16u64 {
        let prefix = Word::from_index(a, i, 4);
        let x = PointWord::new(a, prefix.symbols().to_vec(), vec![0])?;
        let got = point_map_from_iso(&iso, &m, &x, 4)?;
        let want = Word::new(a, prefix.symbols().iter().map(|s| 1 - s).collect())?;
        points.record(got == want, || format!("{prefix} ↦ {got}, expected {want}"));
    }
    Ok(Outcome::new(
        systems.passed() && conj.passed() && points.passed(),
        format!(
            "isomorphy {}, conjugacy {}, {} of 16 prefixes recovered",
            systems.passed(),
            conj.passed(),
            points.cases - points.failures
        ),
    ))
}

/// `U_φ` for the swap passes and yields the swap; mutated operators fail.
pub fn spectral_extraction(_seed: u64) -> Result<Outcome> {
    let a = alphabet(2);
    let m = MeasureContext::bernoulli(2, 3, &["1/2", "1/2"])?;
    let chi = |e: &str| -> Result<StepFunction> { Ok(StepFunction::indicator(&parse_set_expr(e, a)?)) };
    let swap = LinearOnSteps::composition(&Transformation::swap(a), 4)?;
    let verdict = check_spectral_conditions(&m, &m, &swap)?;
    let extracted = verdict.iso.as_ref() == Some(&iso_from_permutation(a, &[1, 0], 4)?);

    let two = Rational::from_integer(2);
    let doubled = LinearOnSteps::new(a, a, 0, [(Word::empty(), chi("ALL")?.scale(&two))])?;
    let doubled = check_spectral_conditions(&m, &m, &doubled)?;
    let doubled_witness = doubled.report.get("idempotent").and_then(|c| c.witnesses.first().cloned());

    let overlap =
        LinearOnSteps::new(a, a, 1, [(Word::parse(a, "0")?, chi("U:0")?), (Word::parse(a, "1")?, chi("ALL")?)])?;
    let overlap = check_spectral_conditions(&m, &m, &overlap)?;
    let overlap_witness = overlap.report.first_failure().and_then(|c| c.witnesses.first().cloned());

    let ok = verdict.passed()
        && extracted
        && !doubled.passed()
        && doubled.iso.is_none()
        && doubled_witness.is_some()
        && !overlap.passed()
        && overlap.iso.is_none()
        && overlap_witness.is_some();
    Ok(Outcome::new(
        ok,
        format!(
            "swap extracted: {extracted}; coefficient 2 rejected with {:?}; overlap rejected with {:?}",
            doubled_witness.unwrap_or_default(),
            overlap_witness.unwrap_or_default()
        ),
    ))
}

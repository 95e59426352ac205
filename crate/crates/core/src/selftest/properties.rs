//! Seeded property suites; every suite runs at least [`MIN_CASES`] cases.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Outcome;
use crate::arith::{Prime, Rational};
use crate::entropy::{approx_cmp, measure_entropy, random_cover, random_partition};
use crate::error::Result;
use crate::measure::{verify_measure_axioms, CountingMeasure, LabelSet, MeasureContext};
use crate::report::{Check, Report};
use crate::shift::{Alphabet, ClopenSet};
use crate::transform::Transformation;

pub const MIN_CASES: usize = 200;

fn alphabet(p: u32) -> Alphabet {
    Alphabet::new(p).expect("small alphabet")
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let scale = [1i64, 2, 3, 4, 5, 8, 9, 25, 27, 125][rng.gen_range(0..10)];
    let num = rng.gen_range(-500i64..=500) * [1, 2, 3, 5, 9][rng.gen_range(0..5)];
    Rational::new(num, scale * rng.gen_range(1i64..=7)).expect("nonzero denominator")
}

fn ultrametric(rng: &mut ChaCha8Rng) -> Check {
    let mut check = Check::new("ultrametric-inequality");
    for _ in 0..MIN_CASES {
        let (x, y) = (random_rational(rng), random_rational(rng));
        for p in [2, 3, 5, 7] {
            let p = Prime::new(p).expect("prime");
            let sum = (&x + &y).abs(p);
            let bound = x.abs(p).max(y.abs(p));
            let product_ok = (&x * &y).abs(p) == x.abs(p).checked_mul(y.abs(p)).expect("same prime");
            check.record(sum <= bound && product_ok, || format!("x = {x}, y = {y}, p = {p}"));
        }
    }
    check
}

fn random_set(rng: &mut ChaCha8Rng, p: u32) -> Result<ClopenSet> {
    let depth = rng.gen_range(0..=4);
    ClopenSet::random(alphabet(p), depth, rng)
}

fn ring_laws(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut check = Check::new("ring-laws");
    for i in 0..MIN_CASES {
        let p = 2 + (i % 2) as u32;
        let (a, b, c) = (random_set(rng, p)?, random_set(rng, p)?, random_set(rng, p)?);
        let laws = [
            a.union(&b)? == b.union(&a)?,
            a.intersection(&b.union(&c)?)? == a.intersection(&b)?.union(&a.intersection(&c)?)?,
            a.difference(&b)? == a.intersection(&b.complement())?,
            a.union(&b)?.complement() == a.complement().intersection(&b.complement())?,
            a.difference(&b)?.union(&a.intersection(&b)?)? == a,
            a.difference(&b)?.is_disjoint(&b)?,
        ];
        check.record(laws.iter().all(|&l| l), || format!("A = {a}, B = {b}, C = {c}: {laws:?}"));
    }
    Ok(check)
}

/// Axiom reports at depth 6 for three measures, folded by check name.
fn axioms(seed: u64) -> Result<Vec<Check>> {
    let measures = [
        MeasureContext::bernoulli(2, 3, &["-2", "3"])?,
        MeasureContext::bernoulli(3, 5, &["-2", "-2", "5"])?,
        MeasureContext::haar(2, 3)?,
    ];
    let mut folded: Vec<Check> = Vec::new();
    for (i, m) in measures.iter().enumerate() {
        let report = verify_measure_axioms(m, 6, seed.wrapping_add(i as u64))?;
        for c in report.checks {
            let name = match c.name.as_str() {
                "monotone" | "convex" | "minimum" => format!("norm-{}", c.name),
                _ => "measure-axioms".to_string(),
            };
            let slot = match folded.iter_mut().position(|f| f.name == name) {
                Some(j) => j,
                None => {
                    folded.push(Check::new(name));
                    folded.len() - 1
                }
            };
            let target = &mut folded[slot];
            target.cases += c.cases;
            target.failures += c.failures;
            target.witnesses.extend(c.witnesses.into_iter().map(|w| format!("{}: {w}", c.name)));
        }
    }
    Ok(folded)
}

/// `‖A‖ = 0` exactly when `μ(A ∩ B) = μ(A)` for every `B`.
fn negligibility(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut check = Check::new("negligibility-equivalence");
    for _ in 0..MIN_CASES {
        let n = rng.gen_range(1..=6);
        let h: Vec<String> = (0..n)
            .map(|_| if rng.gen_bool(0.4) { "0".into() } else { rng.gen_range(-12i64..=12).to_string() })
            .collect();
        let refs: Vec<&str> = h.iter().map(String::as_str).collect();
        let ell = [2, 3, 5][rng.gen_range(0..3)];
        let m = CountingMeasure::from_weights(&refs, ell)?;
        let a = LabelSet(rng.gen_range(0..1u64 << n));
        let mu_a = m.measure_of(a)?;
        let mut absorbing = true;
        for b in 0..1u64 << n {
            if m.measure_of(a.intersection(LabelSet(b)))? != mu_a {
                absorbing = false;
                break;
            }
        }
        let negligible = m.is_negligible(a)?;
        check.record(negligible == absorbing, || format!("h = {h:?}, ℓ = {ell}, A = {a:?}"));
    }
    Ok(check)
}

fn entropy_measure() -> Result<MeasureContext> {
    MeasureContext::bernoulli(3, 5, &["-2", "-2", "5"])
}

/// `H(α ∨ β) ≤ H(α) + H(β)` and `M(α ∨ β) ≤ M(α) M(β)`.
fn join_bounds(rng: &mut ChaCha8Rng) -> Result<(Check, Check)> {
    let m = entropy_measure()?;
    let a = alphabet(3);
    let mut sub = Check::new("entropy-subadditive");
    let mut mult = Check::new("count-submultiplicative");
    for _ in 0..MIN_CASES {
        let x = random_partition(a, rng, 3, 3)?;
        let y = random_partition(a, rng, 3, 3)?;
        let (hx, hy, hxy) = (measure_entropy(&m, &x)?, measure_entropy(&m, &y)?, measure_entropy(&m, &x.join(&y)?)?);
        let bound = hx.approx() + hy.approx();
        sub.record(approx_cmp(&hxy.approx(), &bound) != Ordering::Greater, || {
            format!("α = {x}, β = {y}: {hxy} > {hx} + {hy}")
        });
        mult.record(hxy.count() <= &(hx.count() * hy.count()), || format!("α = {x}, β = {y}"));
    }
    Ok((sub, mult))
}

/// `‖T⁻¹A‖ = ‖A‖` cellwise and `H(T⁻¹α) = H(α)` for measure-preserving `T`.
fn preimage_invariance(rng: &mut ChaCha8Rng) -> Result<Check> {
    let cases = [
        (entropy_measure()?, Transformation::shift(alphabet(3))),
        (MeasureContext::bernoulli(2, 3, &["-2", "3"])?, Transformation::shift(alphabet(2))),
        (entropy_measure()?, Transformation::swap(alphabet(3))),
        (MeasureContext::haar(2, 3)?, Transformation::odometer(alphabet(2))),
    ];
    let mut check = Check::new("entropy-preimage-invariant");
    for i in 0..MIN_CASES {
        let (m, t) = &cases[i % cases.len()];
        let alpha = random_partition(m.alphabet(), rng, 3, 5 - m.alphabet().size().min(3))?;
        let mut ok = measure_entropy(m, &alpha.preimage(t)?)? == measure_entropy(m, &alpha)?;
        for cell in alpha.cells() {
            ok &= m.norm_of(&t.preimage(cell)?)? == m.norm_of(cell)?;
        }
        check.record(ok, || format!("T = {t}, α = {alpha}"));
    }
    Ok(check)
}

/// `α(𝒰 ∨ 𝒲) = α(𝒰) ∨ α(𝒲)` on random covers, and `𝒰 < 𝒲 ⇒ α(𝒰) ≺ α(𝒲)`
/// on partitions.
fn atoms_and_joins(rng: &mut ChaCha8Rng) -> Result<(Check, Check)> {
    let mut join = Check::new("atoms-of-join");
    let mut refine = Check::new("atoms-respect-refinement-on-partitions");
    for i in 0..MIN_CASES {
        let a = alphabet(2 + (i % 2) as u32);
        let u = random_cover(a, rng, 3, 3)?;
        let w = random_cover(a, rng, 3, 3)?;
        let lhs = u.join(&w)?.atoms()?;
        let rhs = u.atoms()?.join(&w.atoms()?)?;
        join.record(lhs == rhs, || format!("𝒰 = {u}, 𝒲 = {w}"));

        let coarse = random_partition(a, rng, 2, 3)?;
        let fine = coarse.join(&random_partition(a, rng, 2, 3)?)?;
        let (cu, fw) = (coarse.to_cover(), fine.to_cover());
        let ok = cu.is_refined_by(&fw)? && cu.atoms()?.is_coarser_than(&fw.atoms()?)?;
        refine.record(ok, || format!("α = {coarse}, β = {fine}"));
    }
    Ok((join, refine))
}

pub fn run(seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::default();
    report.push(ultrametric(&mut rng));
    report.push(ring_laws(&mut rng)?);
    for c in axioms(seed)? {
        report.push(c);
    }
    report.push(negligibility(&mut rng)?);
    let (sub, mult) = join_bounds(&mut rng)?;
    report.push(sub);
    report.push(preimage_invariance(&mut rng)?);
    report.push(mult);
    let (join, refine) = atoms_and_joins(&mut rng)?;
    report.push(join);
    report.push(refine);
    report.note(
        "refinement does not pass to atoms for overlapping covers: \
         𝒰 = {U:00+U:01+U:10, U:01+U:10+U:11} is refined by 𝒲 = {U:0, U:1}, \
         but the atom U:01+U:10 of α(𝒰) is not a union of atoms of α(𝒲)",
    );
    Ok(report)
}

pub fn outcome(seed: u64) -> Result<Outcome> {
    let report = run(seed)?;
    let short: Vec<&Check> = report.checks.iter().filter(|c| c.cases < MIN_CASES).collect();
    let summary: Vec<String> =
        report.checks.iter().map(|c| format!("{} {}/{}", c.name, c.cases - c.failures, c.cases)).collect();
    let mut detail = summary.join(", ");
    if let Some(c) = report.first_failure() {
        detail.push_str(&format!("; first failure in {}: {:?}", c.name, c.witnesses.first()));
    }
    Ok(Outcome::new(report.passed() && short.is_empty(), detail))
}

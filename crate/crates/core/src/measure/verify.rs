use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::shift_measure::MeasureContext;
use crate::arith::{Rational, UltraNorm};
use crate::error::{Error, Result};
use crate::report::{Check, Report};
use crate::shift::{ClopenSet, PointWord, Word};

pub const MAX_VERIFY_DEPTH: u32 = 10;
const RANDOM_CASES: usize = 200;

/// Finite-depth audit of the measure axioms.
///
/// Additivity and the norm properties run on seeded random clopens; the
/// continuity axiom is replaced by its chain proxy: along every short
/// eventually periodic point of norm zero, cylinder norms must never
/// increase and must strictly drop across each period.
pub fn verify_measure_axioms(m: &MeasureContext, depth: u32, seed: u64) -> Result<Report> {
    if depth > MAX_VERIFY_DEPTH {
        return Err(Error::resource("verification depth", depth as u128, MAX_VERIFY_DEPTH as u128));
    }
    let a = m.alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::default();

    let full = ClopenSet::full(a);
    let mut probability = Check::new("probability");
    let mu_full = m.measure_of(&full)?;
    probability.record(mu_full.is_one(), || format!("mu(ALL) = {mu_full}"));
    report.push(probability);

    let mut additivity = Check::new("additivity");
    let mut bounded = Check::new("bounded");
    let mut dominates = Check::new("norm-dominates-subsets");
    let mut monotone = Check::new("monotone");
    let mut convex = Check::new("convex");
    let mut minimum = Check::new("minimum");

    let norm_full = m.norm_of(&full)?;
    bounded.record(norm_full <= UltraNorm::one(m.value_prime()), || format!("||ALL|| = {norm_full}"));

    for _ in 0..RANDOM_CASES {
        let x = ClopenSet::random(a, rng.gen_range(0..=depth), &mut rng)?;
        let y = ClopenSet::random(a, rng.gen_range(0..=depth), &mut rng)?;

        let y_rest = y.difference(&x)?;
        let lhs = m.measure_of(&x.union(&y_rest)?)?;
        let rhs = m.measure_of(&x)? + m.measure_of(&y_rest)?;
        additivity.record(lhs == rhs, || format!("A = {x}, B = {y_rest}: {lhs} != {rhs}"));

        let (nx, ny) = (m.norm_of(&x)?, m.norm_of(&y)?);
        let union = x.union(&y)?;
        let inter = x.intersection(&y)?;
        let (nu, ni) = (m.norm_of(&union)?, m.norm_of(&inter)?);

        bounded.record(nx <= norm_full, || format!("||{x}|| = {nx} > ||ALL||"));
        let mu_inter = m.measure_of(&inter)?.abs(m.value_prime());
        dominates.record(mu_inter <= nx, || format!("|mu({inter})| = {mu_inter} > ||{x}|| = {nx}"));
        monotone
            .record(ni <= nx && nx <= nu, || format!("A = {x}, B = {y}: ||A∩B|| = {ni}, ||A|| = {nx}, ||A∪B|| = {nu}"));
        convex.record(nu <= nx.max(ny), || format!("A = {x}, B = {y}: ||A∪B|| = {nu}"));
        minimum.record(ni <= nx.min(ny), || format!("A = {x}, B = {y}: ||A∩B|| = {ni}"));
    }
    for c in [additivity, bounded, dominates, monotone, convex, minimum] {
        report.push(c);
    }

    report.push(continuity_proxy(m, depth)?);
    report.push(cylinder_partition_sums(m, depth)?);
    Ok(report)
}

fn continuity_proxy(m: &MeasureContext, depth: u32) -> Result<Check> {
    let a = m.alphabet();
    let mut check = Check::new("continuity-proxy");
    let short_words = |max_len: u32, min_len: u32| -> Vec<Vec<u8>> {
        (min_len..=max_len)
            .flat_map(|len| {
                (0..a.count_words(len).unwrap_or(0)).map(move |i| Word::from_index(a, i, len).symbols().to_vec())
            })
            .collect()
    };
    let mut seen = std::collections::HashSet::new();
    for pre in short_words(2, 0) {
        for per in short_words(2, 1) {
            let x = PointWord::new(a, pre.clone(), per)?;
            if !seen.insert(x.clone()) || !m.point_norm(&x)?.is_zero() {
                continue;
            }
            let norms = (0..=depth as usize)
                .map(|n| m.norm_of(&ClopenSet::cylinder(a, &x.prefix(n))?))
                .collect::<Result<Vec<_>>>()?;
            let non_increasing = norms.windows(2).all(|w| w[1] <= w[0]);
            let (start, step) = (x.preperiod().len(), x.period().len());
            let drops = (start..norms.len()).filter(|n| n + step < norms.len()).all(|n| norms[n + step] < norms[n]);
            check.record(non_increasing && drops, || {
                let shown: Vec<String> = norms.iter().map(ToString::to_string).collect();
                format!("x = {x}: norms {}", shown.join(", "))
            });
        }
    }
    Ok(check)
}

/// `μ(C) = Σ μ(C_i)` for each cylinder `C` above `depth`, split into all of
/// its depth-`depth` sub-cylinders.
fn cylinder_partition_sums(m: &MeasureContext, depth: u32) -> Result<Check> {
    let a = m.alphabet();
    let p = a.size() as usize;
    let mut check = Check::new("countable-additivity");
    let mut finest: Vec<Rational> = vec![Rational::one()];
    for _ in 0..depth {
        finest = finest.iter().flat_map(|v| m.weights().iter().map(move |q| v * q)).collect();
    }
    for k in 0..depth {
        let block = p.pow(depth - k);
        for (w, chunk) in finest.chunks(block).enumerate() {
            let word = Word::from_index(a, w as u64, k);
            let direct = m.cylinder_measure(&word);
            let total: Rational = chunk.iter().sum();
            check.record(direct == total, || format!("U_{} : {direct} != sum of parts {total}", word.to_digits(a)));
        }
    }
    Ok(check)
}

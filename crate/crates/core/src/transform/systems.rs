use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::iso::MeasureAlgebraIso;
use super::transformation::Transformation;
use crate::error::{Error, Result};
use crate::measure::MeasureContext;
use crate::report::{Check, Report};
use crate::shift::{all_cylinders, ClopenSet, PointWord, Word};

pub const MAX_DYNAMICS_DEPTH: u32 = 10;
const RANDOM_SETS: usize = 100;
/// Random sets are drawn at depth at most this, whatever the cylinder depth.
const RANDOM_SET_DEPTH: u32 = 6;

fn check_depth(depth: u32) -> Result<()> {
    if depth > MAX_DYNAMICS_DEPTH {
        return Err(Error::resource("dynamics depth", depth as u128, MAX_DYNAMICS_DEPTH as u128));
    }
    Ok(())
}

fn same_alphabet(m: &MeasureContext, t: &Transformation) -> Result<()> {
    if m.alphabet() != t.alphabet() {
        return Err(Error::invalid("measure and transformation use different alphabets"));
    }
    Ok(())
}

/// `μ(T^{-1}A) = μ(A)` on every cylinder to `depth` and on seeded random
/// clopens; for invertible `T` also `μ(T A) = μ(A)`.
///
/// Whether `‖T^{-1}A‖ = ‖A‖` is recorded as a note, not a failure.
pub fn check_measure_preserving(m: &MeasureContext, t: &Transformation, depth: u32, seed: u64) -> Result<Report> {
    check_depth(depth)?;
    same_alphabet(m, t)?;
    let a = m.alphabet();
    let mut sets = all_cylinders(a, depth)?;
    let cylinder_count = sets.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_SETS {
        sets.push(ClopenSet::random(a, rng.gen_range(0..=depth.min(RANDOM_SET_DEPTH)), &mut rng)?);
    }

    let mut cylinders = Check::new("cylinders");
    let mut random = Check::new("random-clopens");
    let mut forward = Check::new("forward-images");
    let mut norm_breaks = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        let pre = t.preimage(set)?;
        let (lhs, rhs) = (m.measure_of(&pre)?, m.measure_of(set)?);
        let check = if i < cylinder_count { &mut cylinders } else { &mut random };
        check.record(lhs == rhs, || format!("A = {set}: mu(T^-1 A) = {lhs}, mu(A) = {rhs}"));
        if t.is_invertible() {
            let img = t.image(set)?;
            let fwd = m.measure_of(&img)?;
            forward.record(fwd == rhs, || format!("A = {set}: mu(T A) = {fwd}, mu(A) = {rhs}"));
        }
        let (n_pre, n_set) = (m.norm_of(&pre)?, m.norm_of(set)?);
        if n_pre != n_set && norm_breaks.len() < 4 {
            norm_breaks.push(format!("||T^-1 {set}|| = {n_pre} but ||{set}|| = {n_set}"));
        }
    }
    let mut report = Report::default();
    report.push(cylinders);
    report.push(random);
    if t.is_invertible() {
        report.push(forward);
    }
    if norm_breaks.is_empty() {
        report.note(format!("||T^-1 A|| = ||A|| held on all {} sets", sets.len()));
    } else {
        for n in norm_breaks {
            report.note(format!("norm not preserved: {n}"));
        }
    }
    Ok(report)
}

/// `Φ(T^{-1}B) = S^{-1}(Φ(B))` for every cylinder `B` to `depth`.
pub fn check_conjugacy(iso: &MeasureAlgebraIso, t: &Transformation, s: &Transformation, depth: u32) -> Result<Report> {
    if t.alphabet() != iso.source() || s.alphabet() != iso.target() {
        return Err(Error::invalid("transformations do not match the isomorphism alphabets"));
    }
    let needed = depth + t.depth_increase();
    if needed > iso.depth() {
        return Err(Error::resource("isomorphism depth for conjugacy check", needed as u128, iso.depth() as u128));
    }
    let mut check = Check::new("conjugacy");
    for b in all_cylinders(iso.source(), depth)? {
        let lhs = iso.apply(&t.preimage(&b)?)?;
        let rhs = s.preimage(&iso.apply(&b)?)?;
        check.record(lhs == rhs, || format!("B = {b}: Phi(T^-1 B) = {lhs}, S^-1 Phi(B) = {rhs}"));
    }
    let mut report = Report::default();
    report.push(check);
    Ok(report)
}

/// `φ(x)` truncated to length `d`, read off from `⋂_n Φ(U_{x[0:n)})`.
pub fn point_map_from_iso(iso: &MeasureAlgebraIso, m: &MeasureContext, x: &PointWord, d: u32) -> Result<Word> {
    if m.alphabet() != iso.source() || x.alphabet() != iso.source() {
        return Err(Error::invalid("point, measure and isomorphism alphabets differ"));
    }
    if m.point_norm(x)?.is_zero() {
        return Err(Error::Domain(format!("N_mu({x}) = 0: the point lies in the negligible set")));
    }
    // Φ preserves inclusion, so the chain of images is nested and the
    // deepest image is the intersection.
    let deepest = iso.apply(&ClopenSet::cylinder(iso.source(), &x.prefix(iso.depth() as usize))?)?;
    if deepest.is_empty() {
        return Err(Error::Internal(format!("image of the cylinder chain of {x} is empty")));
    }
    let target = iso.target();
    let mut prefixes: Vec<u64> = if deepest.depth() >= d {
        let stride = target.count_words(deepest.depth() - d).expect("bounded depth");
        deepest.indices().iter().map(|&w| w / stride).collect()
    } else {
        deepest.refine_to_depth(d)?
    };
    prefixes.dedup();
    match prefixes.as_slice() {
        [only] => Ok(Word::from_index(target, *only, d)),
        _ => Err(Error::NeedsMoreDepth(format!(
            "{} length-{d} prefixes remain after depth {}",
            prefixes.len(),
            iso.depth()
        ))),
    }
}

/// Isomorphy of `(X, μ, T)` and `(X, ν, S)` through the invertible point map
/// `φ`: measure preservation `μ(φ^{-1}B) = ν(B)` and the intertwining
/// `φ ∘ T = S ∘ φ`, at set level on cylinders and pointwise on short
/// eventually periodic points.
pub fn check_iso_of_systems(
    phi: &Transformation,
    t: &Transformation,
    s: &Transformation,
    mu: &MeasureContext,
    nu: &MeasureContext,
    depth: u32,
) -> Result<Report> {
    check_depth(depth)?;
    if !phi.is_invertible() {
        return Err(Error::invalid("the point map must be invertible"));
    }
    for tr in [t, s] {
        same_alphabet(mu, tr)?;
    }
    same_alphabet(mu, phi)?;
    same_alphabet(nu, phi)?;
    let a = mu.alphabet();

    let mut preserving = Check::new("measure-preserving");
    let mut intertwining = Check::new("intertwining");
    for b in all_cylinders(a, depth)? {
        let pulled = phi.preimage(&b)?;
        let (lhs, rhs) = (mu.measure_of(&pulled)?, nu.measure_of(&b)?);
        preserving.record(lhs == rhs, || format!("B = {b}: mu(phi^-1 B) = {lhs}, nu(B) = {rhs}"));
        let left = t.preimage(&pulled)?;
        let right = phi.preimage(&s.preimage(&b)?)?;
        intertwining.record(left == right, || format!("B = {b}: T^-1 phi^-1 B = {left}, phi^-1 S^-1 B = {right}"));
    }

    let mut pointwise = Check::new("pointwise");
    for x in short_points(a)? {
        let lhs = phi.apply_point(&t.apply_point(&x)?)?;
        let rhs = s.apply_point(&phi.apply_point(&x)?)?;
        pointwise.record(lhs == rhs, || format!("x = {x}: phi(T x) = {lhs}, S(phi x) = {rhs}"));
    }

    let mut report = Report::default();
    report.push(preserving);
    report.push(intertwining);
    report.push(pointwise);
    Ok(report)
}

/// Eventually periodic points with preperiod and period of length at most 2.
pub(crate) fn short_points(a: crate::shift::Alphabet) -> Result<Vec<PointWord>> {
    let words = |min: u32| -> Vec<Vec<u8>> {
        (min..=2)
            .flat_map(|n| (0..a.count_words(n).unwrap_or(0)).map(move |i| Word::from_index(a, i, n).symbols().to_vec()))
            .collect()
    };
    let mut out = Vec::new();
    for pre in words(0) {
        for per in words(1) {
            let x = PointWord::new(a, pre.clone(), per)?;
            if !out.contains(&x) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

use serde::Serialize;

use crate::arith::{Prime, Rational, UltraNorm};
use crate::error::{Error, Result};

/// Largest subset for which the exhaustive norm search runs.
pub const MAX_BRUTE_FORCE: u32 = 20;
/// Ground sets are indexed by bits of a `u64`.
pub const MAX_GROUND: usize = 64;

/// Subset of a counting measure's ground set, one bit per label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct LabelSet(pub u64);

impl LabelSet {
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn intersection(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & other.0)
    }

    pub fn union(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 | other.0)
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// `κ(A) = Σ_{a∈A} h(a)` on all subsets of a finite labelled set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountingMeasure {
    labels: Vec<String>,
    h: Vec<Rational>,
    value_prime: Prime,
}

impl CountingMeasure {
    pub fn new(labels: Vec<String>, h: Vec<Rational>, value_prime: Prime) -> Result<Self> {
        if labels.len() != h.len() {
            return Err(Error::invalid(format!("{} labels but {} weights", labels.len(), h.len())));
        }
        if labels.len() > MAX_GROUND {
            return Err(Error::resource("counting ground set", labels.len() as u128, MAX_GROUND as u128));
        }
        let mut seen = labels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(Error::invalid("duplicate labels"));
        }
        Ok(CountingMeasure { labels, h, value_prime })
    }

    /// Labels `"0"`, `"1"`, … for the given weights.
    pub fn from_weights(h: &[&str], value_prime: u64) -> Result<Self> {
        let h = h.iter().map(|w| w.parse()).collect::<Result<Vec<Rational>>>()?;
        let labels = (0..h.len()).map(|i| i.to_string()).collect();
        CountingMeasure::new(labels, h, Prime::new(value_prime)?)
    }

    pub fn value_prime(&self) -> Prime {
        self.value_prime
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[Rational] {
        &self.h
    }

    pub fn ground(&self) -> LabelSet {
        LabelSet(if self.h.len() == 64 { u64::MAX } else { (1u64 << self.h.len()) - 1 })
    }

    /// Parse a comma-separated label list; the empty string is `∅`.
    pub fn parse_set(&self, text: &str) -> Result<LabelSet> {
        let mut bits = 0u64;
        for label in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let i = self
                .labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::invalid(format!("unknown label {label:?}")))?;
            bits |= 1 << i;
        }
        Ok(LabelSet(bits))
    }

    fn check(&self, set: LabelSet) -> Result<()> {
        if set.0 & !self.ground().0 != 0 {
            return Err(Error::invalid("set contains indices outside the ground set"));
        }
        Ok(())
    }

    pub fn measure_of(&self, set: LabelSet) -> Result<Rational> {
        self.check(set)?;
        Ok(set.members().map(|i| &self.h[i]).sum())
    }

    /// `sup{|κ(B)| : B ⊆ A}` by enumerating every subset of `A`.
    pub fn counting_norm(&self, set: LabelSet) -> Result<UltraNorm> {
        self.check(set)?;
        if set.len() > MAX_BRUTE_FORCE {
            return Err(Error::resource("subset enumeration", set.len() as u128, MAX_BRUTE_FORCE as u128));
        }
        let members: Vec<usize> = set.members().collect();
        let mut best = UltraNorm::Zero;
        for mask in 0u32..(1u32 << members.len()) {
            let sum: Rational =
                members.iter().enumerate().filter(|(bit, _)| mask >> bit & 1 == 1).map(|(_, &i)| &self.h[i]).sum();
            best = best.max(sum.abs(self.value_prime));
        }
        Ok(best)
    }

    pub fn norm_of(&self, set: LabelSet) -> Result<UltraNorm> {
        self.counting_norm(set)
    }

    /// `N_κ(x) = |h(x)|`: the singleton is the smallest set containing `x`.
    pub fn point_norm(&self, label: usize) -> Result<UltraNorm> {
        self.h
            .get(label)
            .map(|w| w.abs(self.value_prime))
            .ok_or_else(|| Error::invalid(format!("label index {label} out of range")))
    }

    pub fn is_negligible(&self, set: LabelSet) -> Result<bool> {
        Ok(self.norm_of(set)?.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn prime(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn counting_norm_examples() {
        let m = CountingMeasure::from_weights(&["1", "1"], 2).unwrap();
        assert_eq!(m.counting_norm(m.ground()).unwrap(), UltraNorm::one(prime(2)));
        let z = CountingMeasure::from_weights(&["0"], 7).unwrap();
        assert_eq!(z.counting_norm(z.ground()).unwrap(), UltraNorm::Zero);
        let t = CountingMeasure::from_weights(&["3", "6"], 3).unwrap();
        assert_eq!(t.counting_norm(t.ground()).unwrap(), UltraNorm::power(prime(3), 1));
    }

    #[test]
    fn negligible_labels() {
        let m = CountingMeasure::new(
            vec!["a".into(), "b".into()],
            vec!["0".parse().unwrap(), "5".parse().unwrap()],
            prime(5),
        )
        .unwrap();
        let a = m.parse_set("a").unwrap();
        assert!(m.is_negligible(a).unwrap());
        assert!(!m.is_negligible(m.parse_set("a,b").unwrap()).unwrap());
        assert_eq!(m.point_norm(0).unwrap(), UltraNorm::Zero);
        assert_eq!(m.point_norm(1).unwrap(), UltraNorm::power(prime(5), 1));
        assert!(m.parse_set("c").is_err());
    }

    #[test]
    fn too_large_for_brute_force() {
        let h: Vec<String> = (0..21).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = h.iter().map(String::as_str).collect();
        let m = CountingMeasure::from_weights(&refs, 3).unwrap();
        assert!(matches!(m.counting_norm(m.ground()), Err(Error::Resource { .. })));
    }

    #[test]
    fn negligibility_matches_intersection_criterion() {
        // ‖A‖ = 0  ⇔  μ(A ∩ B) = μ(A) for every B.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let h: Vec<String> = (0..n)
                .map(|_| if rng.gen_bool(0.4) { "0".to_string() } else { rng.gen_range(-9i64..=9).to_string() })
                .collect();
            let refs: Vec<&str> = h.iter().map(String::as_str).collect();
            let m = CountingMeasure::from_weights(&refs, 3).unwrap();
            let a = LabelSet(rng.gen_range(0..1u64 << n));
            let mu_a = m.measure_of(a).unwrap();
            let all_b = (0..1u64 << n).all(|b| m.measure_of(a.intersection(LabelSet(b))).unwrap() == mu_a);
            assert_eq!(m.is_negligible(a).unwrap(), all_b);
        }
    }
}

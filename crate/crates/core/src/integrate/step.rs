use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{Rational, UltraNorm};
use crate::error::{Error, Result};
use crate::measure::MeasureContext;
use crate::shift::{parse_set_expr, Alphabet, ClopenSet, PointWord};
use crate::transform::Transformation;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: Rational,
    pub support: ClopenSet,
}

/// `Σ α_i χ_{A_i}` in canonical form: one term per distinct nonzero value,
/// supports nonempty and pairwise disjoint, terms ordered by support.
/// The zero function has no terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepFunction {
    alphabet: Alphabet,
    terms: Vec<Term>,
}

impl StepFunction {
    pub fn zero(alphabet: Alphabet) -> Self {
        StepFunction { alphabet, terms: Vec::new() }
    }

    pub fn indicator(set: &ClopenSet) -> Self {
        StepFunction::scaled_indicator(Rational::one(), set)
    }

    pub fn scaled_indicator(coeff: Rational, set: &ClopenSet) -> Self {
        if coeff.is_zero() || set.is_empty() {
            return StepFunction::zero(set.alphabet());
        }
        StepFunction { alphabet: set.alphabet(), terms: vec![Term { coeff, support: set.clone() }] }
    }

    pub fn constant(alphabet: Alphabet, c: Rational) -> Self {
        StepFunction::scaled_indicator(c, &ClopenSet::full(alphabet))
    }

    /// Canonical form of `Σ α_i χ_{A_i}` for arbitrary, possibly
    /// overlapping supports.
    pub fn from_terms(alphabet: Alphabet, raw: impl IntoIterator<Item = (Rational, ClopenSet)>) -> Result<Self> {
        let raw: Vec<(Rational, ClopenSet)> = raw.into_iter().collect();
        if let Some((_, bad)) = raw.iter().find(|(_, s)| s.alphabet() != alphabet) {
            return Err(Error::invalid(format!(
                "support over alphabet {} in a step function over {}",
                bad.alphabet().size(),
                alphabet.size()
            )));
        }
        let depth = raw.iter().map(|(_, s)| s.depth()).max().unwrap_or(0);
        let mut values: BTreeMap<u64, Rational> = BTreeMap::new();
        for (c, s) in &raw {
            if c.is_zero() {
                continue;
            }
            for w in s.refine_to_depth(depth)? {
                *values.entry(w).or_insert_with(Rational::zero) += c;
            }
        }
        StepFunction::from_values(alphabet, depth, values)
    }

    /// Regroup a word → value table at one depth into canonical terms.
    fn from_values(alphabet: Alphabet, depth: u32, values: BTreeMap<u64, Rational>) -> Result<Self> {
        let mut groups: BTreeMap<Rational, Vec<u64>> = BTreeMap::new();
        for (w, c) in values {
            if !c.is_zero() {
                groups.entry(c).or_default().push(w);
            }
        }
        let mut terms = groups
            .into_iter()
            .map(|(coeff, words)| Ok(Term { coeff, support: ClopenSet::from_indices(alphabet, depth, words)? }))
            .collect::<Result<Vec<_>>>()?;
        terms.sort_by(|a, b| a.support.cmp(&b.support));
        Ok(StepFunction { alphabet, terms })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Only the value 1 occurs: this is `χ_A` for `A` = the support.
    pub fn is_indicator(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_one())
    }

    pub fn depth(&self) -> u32 {
        self.terms.iter().map(|t| t.support.depth()).max().unwrap_or(0)
    }

    pub fn support(&self) -> Result<ClopenSet> {
        self.terms.iter().try_fold(ClopenSet::empty(self.alphabet), |acc, t| acc.union(&t.support))
    }

    fn same_alphabet(&self, other: &StepFunction) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::invalid("step functions over different alphabets"));
        }
        Ok(())
    }

    fn values_at(&self, depth: u32) -> Result<BTreeMap<u64, Rational>> {
        let mut out = BTreeMap::new();
        for t in &self.terms {
            for w in t.support.refine_to_depth(depth)? {
                out.insert(w, t.coeff.clone());
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.same_alphabet(other)?;
        let terms = self.terms.iter().chain(&other.terms).map(|t| (t.coeff.clone(), t.support.clone()));
        StepFunction::from_terms(self.alphabet, terms)
    }

    pub fn scale(&self, c: &Rational) -> StepFunction {
        if c.is_zero() {
            return StepFunction::zero(self.alphabet);
        }
        // distinct values stay distinct under a nonzero factor
        let terms = self.terms.iter().map(|t| Term { coeff: &t.coeff * c, support: t.support.clone() }).collect();
        StepFunction { alphabet: self.alphabet, terms }
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction> {
        self.add(&other.scale(&Rational::from(-1)))
    }

    /// Pointwise product, by refinement to a common depth.
    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        self.same_alphabet(other)?;
        let depth = self.depth().max(other.depth());
        let (a, b) = (self.values_at(depth)?, other.values_at(depth)?);
        let values = a.into_iter().filter_map(|(w, x)| b.get(&w).map(|y| (w, x * y))).collect();
        StepFunction::from_values(self.alphabet, depth, values)
    }

    /// `f(x)`.
    pub fn eval(&self, x: &PointWord) -> Result<Rational> {
        for t in &self.terms {
            if t.support.contains_point(x)? {
                return Ok(t.coeff.clone());
            }
        }
        Ok(Rational::zero())
    }

    /// `∫ f dμ = Σ α_i μ(A_i)`.
    pub fn integrate(&self, m: &MeasureContext) -> Result<Rational> {
        let mut total = Rational::zero();
        for t in &self.terms {
            total += &(&t.coeff * &m.measure_of(&t.support)?);
        }
        Ok(total)
    }

    /// `‖f‖_μ = sup_x |f(x)| N_μ(x) = max_i |α_i| ‖A_i‖` on disjoint supports.
    pub fn step_norm(&self, m: &MeasureContext) -> Result<UltraNorm> {
        let mut best = UltraNorm::Zero;
        for t in &self.terms {
            let part = t.coeff.abs(m.value_prime()) * m.norm_of(&t.support)?;
            best = best.max(part);
        }
        Ok(best)
    }

    /// `U_T f = f ∘ T`, using `χ_A ∘ T = χ_{T^{-1}A}`.
    pub fn compose_with_transformation(&self, t: &Transformation) -> Result<StepFunction> {
        let terms = self
            .terms
            .iter()
            .map(|term| Ok((term.coeff.clone(), t.preimage(&term.support)?)))
            .collect::<Result<Vec<_>>>()?;
        StepFunction::from_terms(self.alphabet, terms)
    }

    pub fn to_json(&self) -> String {
        let repr = StepRepr {
            terms: self
                .terms
                .iter()
                .map(|t| TermRepr { coeff: t.coeff.clone(), set: SetRepr::Set(t.support.clone()) })
                .collect(),
        };
        serde_json::to_string(&repr).expect("step function serializes")
    }

    /// `{"terms":[{"coeff":"2","set":…}]}` where each set is either the JSON
    /// clopen form or a set expression.
    pub fn from_json(text: &str, alphabet: Alphabet) -> Result<Self> {
        let repr: StepRepr = serde_json::from_str(text).map_err(|e| Error::invalid(format!("step function: {e}")))?;
        let terms = repr
            .terms
            .into_iter()
            .map(|t| {
                let set = match t.set {
                    SetRepr::Set(s) => s,
                    SetRepr::Expr(e) => parse_set_expr(&e, alphabet)?,
                };
                Ok((t.coeff, set))
            })
            .collect::<Result<Vec<_>>>()?;
        StepFunction::from_terms(alphabet, terms)
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| format!("{}·χ[{}]", t.coeff, t.support)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: Rational,
    set: SetRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SetRepr {
    Set(ClopenSet),
    Expr(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, Prime};
    use crate::shift::all_cylinders;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a(p: u32) -> Alphabet {
        Alphabet::new(p).unwrap()
    }

    fn s(expr: &str) -> ClopenSet {
        parse_set_expr(expr, a(2)).unwrap()
    }

    fn m23() -> MeasureContext {
        MeasureContext::bernoulli(2, 3, &["-2", "3"]).unwrap()
    }

    fn random_step(p: u32, rng: &mut ChaCha8Rng) -> StepFunction {
        let n = rng.gen_range(0..4);
        let terms: Vec<(Rational, ClopenSet)> = (0..n)
            .map(|_| {
                let c = Rational::new(rng.gen_range(-20..=20), rng.gen_range(1..=12)).unwrap();
                (c, ClopenSet::random(a(p), rng.gen_range(0..=4), rng).unwrap())
            })
            .collect();
        StepFunction::from_terms(a(p), terms).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let f = StepFunction::from_terms(a(2), [(q("1"), s("U:0")), (q("1"), s("ALL"))]).unwrap();
        assert_eq!(f.terms().len(), 2);
        assert_eq!(f.terms()[0], Term { coeff: q("2"), support: s("U:0") });
        assert_eq!(f.terms()[1], Term { coeff: q("1"), support: s("U:1") });
        let z = StepFunction::from_terms(a(2), [(q("1"), s("U:0")), (q("-1"), s("U:0"))]).unwrap();
        assert!(z.is_zero());
        let merged = StepFunction::from_terms(a(2), [(q("1"), s("U:00")), (q("1"), s("U:01"))]).unwrap();
        assert_eq!(merged, StepFunction::indicator(&s("U:0")));
    }

    #[test]
    fn integral_and_norm_examples() {
        let m = m23();
        assert_eq!(StepFunction::indicator(&s("ALL")).integrate(&m).unwrap(), q("1"));
        let f = StepFunction::from_terms(a(2), [(q("1"), s("U:0")), (q("2"), s("U:1"))]).unwrap();
        assert_eq!(f.integrate(&m).unwrap(), q("4"));
        assert_eq!(StepFunction::zero(a(2)).integrate(&m).unwrap(), q("0"));
        let three = Prime::new(3).unwrap();
        assert_eq!(StepFunction::indicator(&s("U:11")).step_norm(&m).unwrap(), UltraNorm::power(three, 2));
        assert_eq!(StepFunction::zero(a(2)).step_norm(&m).unwrap(), UltraNorm::Zero);
        assert_eq!(f.step_norm(&m).unwrap(), UltraNorm::one(three));
    }

    #[test]
    fn composition_examples() {
        let shift = Transformation::shift(a(2));
        let f = StepFunction::indicator(&s("U:0")).compose_with_transformation(&shift).unwrap();
        assert_eq!(f, StepFunction::indicator(&s("U:00 + U:10")));
        assert!(StepFunction::zero(a(2)).compose_with_transformation(&shift).unwrap().is_zero());
        let swap = Transformation::swap(a(2));
        let g = StepFunction::indicator(&s("U:0")).compose_with_transformation(&swap).unwrap();
        assert_eq!(g, StepFunction::indicator(&s("U:1")));
    }

    #[test]
    fn indicator_norm_is_sup_of_point_norms() {
        // sup over x ∈ U_w of N(x) is attained at w·u^∞ for a unit-weight symbol u
        for (m, unit) in [(m23(), 0u8), (MeasureContext::bernoulli(3, 5, &["-2", "-2", "5"]).unwrap(), 0)] {
            let alphabet = m.alphabet();
            for cyl in all_cylinders(alphabet, 6).unwrap() {
                let chi = StepFunction::indicator(&cyl);
                let mut sup = UltraNorm::Zero;
                for w in cyl.maximal_cylinders() {
                    let x = PointWord::new(alphabet, w.symbols().to_vec(), vec![unit]).unwrap();
                    sup = sup.max(chi.eval(&x).unwrap().abs(m.value_prime()) * m.point_norm(&x).unwrap());
                }
                assert_eq!(chi.step_norm(&m).unwrap(), sup, "{cyl}");
                assert_eq!(chi.step_norm(&m).unwrap(), m.norm_of(&cyl).unwrap());
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f = StepFunction::from_terms(a(2), [(q("2"), s("U:0")), (q("-1/3"), s("U:11"))]).unwrap();
        assert_eq!(StepFunction::from_json(&f.to_json(), a(2)).unwrap(), f);
        let g = StepFunction::from_json(r#"{"terms":[{"coeff":"2","set":"U:0"},{"coeff":"2","set":"U:1"}]}"#, a(2))
            .unwrap();
        assert_eq!(g, StepFunction::constant(a(2), q("2")));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn integral_bounded_by_norm(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = m23();
            let f = random_step(2, &mut rng);
            prop_assert!(f.integrate(&m).unwrap().abs(m.value_prime()) <= f.step_norm(&m).unwrap());
        }

        #[test]
        fn integral_is_linear(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = MeasureContext::bernoulli(3, 5, &["-2", "-2", "5"]).unwrap();
            let (f, g) = (random_step(3, &mut rng), random_step(3, &mut rng));
            let c = Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=5)).unwrap();
            let lhs = f.add(&g.scale(&c)).unwrap().integrate(&m).unwrap();
            let rhs = f.integrate(&m).unwrap() + c * g.integrate(&m).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn product_matches_pointwise(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (f, g) = (random_step(2, &mut rng), random_step(2, &mut rng));
            let fg = f.mul(&g).unwrap();
            for _ in 0..10 {
                let pre: Vec<u8> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..2)).collect();
                let x = PointWord::new(a(2), pre, vec![rng.gen_range(0..2)]).unwrap();
                prop_assert_eq!(fg.eval(&x).unwrap(), f.eval(&x).unwrap() * g.eval(&x).unwrap());
            }
        }

        #[test]
        fn change_of_variables(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = m23();
            let f = random_step(2, &mut rng);
            let shift = Transformation::shift(a(2));
            let g = f.compose_with_transformation(&shift).unwrap();
            prop_assert_eq!(g.integrate(&m).unwrap(), f.integrate(&m).unwrap());
            let haar = MeasureContext::haar(2, 3).unwrap();
            let odo = Transformation::odometer(a(2));
            let h = f.compose_with_transformation(&odo).unwrap();
            prop_assert_eq!(h.integrate(&haar).unwrap(), f.integrate(&haar).unwrap());
        }

        #[test]
        fn invertible_maps_preserve_step_norm(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_step(2, &mut rng);
            let sym = MeasureContext::bernoulli(2, 3, &["1/2", "1/2"]).unwrap();
            let swap = Transformation::swap(a(2));
            prop_assert_eq!(f.compose_with_transformation(&swap).unwrap().step_norm(&sym).unwrap(), f.step_norm(&sym).unwrap());
            let haar = MeasureContext::haar(2, 5).unwrap();
            let odo = Transformation::odometer(a(2));
            prop_assert_eq!(f.compose_with_transformation(&odo).unwrap().step_norm(&haar).unwrap(), f.step_norm(&haar).unwrap());
        }

        #[test]
        fn composition_is_contravariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_step(3, &mut rng);
            let t = Transformation::permutation(a(3), vec![1, 2, 0]).unwrap();
            let s = Transformation::swap(a(3));
            // U_{T∘S} = U_S ∘ U_T
            let lhs = f.compose_with_transformation(&t.compose(&s).unwrap()).unwrap();
            let rhs = f.compose_with_transformation(&t).unwrap().compose_with_transformation(&s).unwrap();
            prop_assert_eq!(lhs, rhs);
            let shift = Transformation::shift(a(3));
            let twice = StepFunction::from_terms(
                a(3),
                f.terms().iter().map(|t| (t.coeff.clone(), t.support.shift_preimage(2).unwrap())),
            ).unwrap();
            let iterated = f.compose_with_transformation(&shift).unwrap().compose_with_transformation(&shift).unwrap();
            prop_assert_eq!(twice, iterated);
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::Serialize;

use super::subcover;
use crate::error::{Error, Result};
use crate::shift::{parse_set_expr, Alphabet, ClopenSet, Word, MAX_WORDS};
use crate::transform::Transformation;

/// Largest family accepted by [`partition_from_sets`].
pub const MAX_ATOM_SETS: usize = 16;
/// Bound on `pairs × bitset words` work in a cover join.
const MAX_JOIN_WORK: u128 = 1 << 28;

/// Number of words at `depth`, within the refinement budget.
fn word_total(alphabet: Alphabet, depth: u32) -> Result<u64> {
    match alphabet.count_words(depth) {
        Some(n) if n <= MAX_WORDS => Ok(n),
        Some(n) => Err(Error::resource("words at join depth", n as u128, MAX_WORDS as u128)),
        None => Err(Error::resource("words at join depth", u128::MAX, MAX_WORDS as u128)),
    }
}

/// Depth the `n`-fold dynamical join is computed at.
fn final_depth(depth: u32, t: &Transformation, n: u32) -> u32 {
    depth.saturating_add(t.depth_increase().saturating_mul(n - 1))
}

fn max_depth(sets: &[ClopenSet]) -> u32 {
    sets.iter().map(ClopenSet::depth).max().unwrap_or(0)
}

fn same_alphabet(alphabet: Alphabet, sets: &[ClopenSet]) -> Result<()> {
    match sets.iter().find(|s| s.alphabet() != alphabet) {
        Some(s) => Err(Error::invalid(format!(
            "set {s} is over {} symbols, expected {}",
            s.alphabet().size(),
            alphabet.size()
        ))),
        None => Ok(()),
    }
}

/// Bitset of the depth-`depth` words of `set`.
pub(crate) fn to_bits(set: &ClopenSet, depth: u32, total: u64) -> Result<Vec<u64>> {
    let mut bits = vec![0u64; total.div_ceil(64) as usize];
    for w in set.refine_to_depth(depth)? {
        bits[(w / 64) as usize] |= 1 << (w % 64);
    }
    Ok(bits)
}

pub(crate) fn ones(bits: &[u64]) -> impl Iterator<Item = u64> + '_ {
    bits.iter().enumerate().flat_map(|(i, &chunk)| {
        let mut rest = chunk;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as u64;
            rest &= rest - 1;
            Some(i as u64 * 64 + b)
        })
    })
}

fn from_bits(alphabet: Alphabet, depth: u32, bits: &[u64]) -> Result<ClopenSet> {
    ClopenSet::from_indices(alphabet, depth, ones(bits))
}

fn parse_family(alphabet: Alphabet, text: &str) -> Result<Vec<ClopenSet>> {
    text.split('|').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_set_expr(s, alphabet)).collect()
}

/// A finite clopen partition of `Ω`: nonempty, pairwise disjoint cells
/// covering everything. Cells are canonical and sorted, so equality is
/// equality of partitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    #[serde(skip)]
    alphabet: Alphabet,
    cells: Vec<ClopenSet>,
}

impl Partition {
    /// Validates disjointness and covering; empty cells are dropped.
    pub fn new(alphabet: Alphabet, cells: Vec<ClopenSet>) -> Result<Self> {
        same_alphabet(alphabet, &cells)?;
        let mut cells: Vec<ClopenSet> = cells.into_iter().filter(|c| !c.is_empty()).collect();
        let depth = max_depth(&cells);
        let total = word_total(alphabet, depth)?;
        let mut owner = vec![u32::MAX; total as usize];
        for (i, cell) in cells.iter().enumerate() {
            for w in cell.refine_to_depth(depth)? {
                if owner[w as usize] != u32::MAX {
                    return Err(Error::invalid(format!(
                        "cells {} and {cell} overlap on word {}",
                        cells[owner[w as usize] as usize],
                        Word::from_index(alphabet, w, depth)
                    )));
                }
                owner[w as usize] = i as u32;
            }
        }
        if let Some(w) = owner.iter().position(|&o| o == u32::MAX) {
            return Err(Error::invalid(format!(
                "cells do not cover word {}",
                Word::from_index(alphabet, w as u64, depth)
            )));
        }
        cells.sort();
        Ok(Partition { alphabet, cells })
    }

    /// Cells given as `|`-separated set expressions.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        Partition::new(alphabet, parse_family(alphabet, text)?)
    }

    /// `{Ω}`.
    pub fn trivial(alphabet: Alphabet) -> Self {
        Partition { alphabet, cells: vec![ClopenSet::full(alphabet)] }
    }

    /// All cylinders of length `depth`.
    pub fn cylinders(alphabet: Alphabet, depth: u32) -> Result<Self> {
        let total = word_total(alphabet, depth)?;
        let cells = (0..total).map(|w| ClopenSet::from_indices(alphabet, depth, [w])).collect::<Result<Vec<_>>>()?;
        Ok(Partition { alphabet, cells })
    }

    /// Caller guarantees the partition invariants.
    fn from_valid(alphabet: Alphabet, mut cells: Vec<ClopenSet>) -> Self {
        cells.sort();
        Partition { alphabet, cells }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn cells(&self) -> &[ClopenSet] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn depth(&self) -> u32 {
        max_depth(&self.cells)
    }

    /// Owning cell index of every word at `depth ≥ self.depth()`.
    fn labels(&self, depth: u32) -> Result<Vec<u32>> {
        let total = word_total(self.alphabet, depth)?;
        let mut owner = vec![0u32; total as usize];
        for (i, cell) in self.cells.iter().enumerate() {
            for w in cell.refine_to_depth(depth)? {
                owner[w as usize] = i as u32;
            }
        }
        Ok(owner)
    }

    /// `α ∨ β`: all nonempty `A ∩ B`.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.alphabet != other.alphabet {
            return Err(Error::invalid("partitions over different alphabets"));
        }
        let depth = self.depth().max(other.depth());
        let (la, lb) = (self.labels(depth)?, other.labels(depth)?);
        let mut groups: BTreeMap<(u32, u32), Vec<u64>> = BTreeMap::new();
        for (w, (&a, &b)) in la.iter().zip(&lb).enumerate() {
            groups.entry((a, b)).or_default().push(w as u64);
        }
        let cells = groups
            .into_values()
            .map(|words| ClopenSet::from_indices(self.alphabet, depth, words))
            .collect::<Result<Vec<_>>>()?;
        Ok(Partition::from_valid(self.alphabet, cells))
    }

    /// `T⁻¹α`; preimages of a partition partition `Ω` again.
    pub fn preimage(&self, t: &Transformation) -> Result<Partition> {
        self.preimage_iter(t, 1)
    }

    fn preimage_iter(&self, t: &Transformation, k: u32) -> Result<Partition> {
        let cells = self
            .cells
            .iter()
            .map(|c| t.preimage_iter(c, k))
            .filter(|c| !matches!(c, Ok(c) if c.is_empty()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Partition::from_valid(self.alphabet, cells))
    }

    /// `Tα` for invertible `T`.
    pub fn image(&self, t: &Transformation) -> Result<Partition> {
        if !t.is_invertible() {
            return Err(Error::invalid(format!("{t} is not invertible")));
        }
        let cells = self.cells.iter().map(|c| t.image(c)).collect::<Result<Vec<_>>>()?;
        Ok(Partition::from_valid(self.alphabet, cells))
    }

    /// `α ∨ T⁻¹α ∨ … ∨ T^{-(n-1)}α`.
    pub fn dynamical_join(&self, t: &Transformation, n: u32) -> Result<Partition> {
        Ok(self.dynamical_joins(t, n)?.pop().expect("n ≥ 1"))
    }

    /// The `k`-fold dynamical joins for `k = 1..=n`.
    pub fn dynamical_joins(&self, t: &Transformation, n: u32) -> Result<Vec<Partition>> {
        if n == 0 {
            return Err(Error::invalid("the number of join steps must be at least 1"));
        }
        word_total(self.alphabet, final_depth(self.depth(), t, n))?;
        let mut out = vec![self.clone()];
        for k in 1..n {
            let next = out[k as usize - 1].join(&self.preimage_iter(t, k)?)?;
            out.push(next);
        }
        Ok(out)
    }

    /// `self ≺ finer`: every cell of `self` is a union of cells of `finer`.
    pub fn is_coarser_than(&self, finer: &Partition) -> Result<bool> {
        for b in &finer.cells {
            let mut inside = false;
            for a in &self.cells {
                if b.is_subset(a)? {
                    inside = true;
                    break;
                }
            }
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_cover(&self) -> Cover {
        Cover { alphabet: self.alphabet, members: self.cells.clone() }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cells.iter().map(ClopenSet::to_expr).collect();
        f.write_str(&parts.join(" | "))
    }
}

/// The atoms `B_1 ∩ … ∩ B_k`, `B_i ∈ {C_i, Ω∖C_i}`, that are nonempty.
pub fn partition_from_sets(alphabet: Alphabet, sets: &[ClopenSet]) -> Result<Partition> {
    if sets.len() > MAX_ATOM_SETS {
        return Err(Error::resource("atom generating sets", sets.len() as u128, MAX_ATOM_SETS as u128));
    }
    same_alphabet(alphabet, sets)?;
    let depth = max_depth(sets);
    let total = word_total(alphabet, depth)?;
    let mut mask = vec![0u32; total as usize];
    for (i, set) in sets.iter().enumerate() {
        for w in set.refine_to_depth(depth)? {
            mask[w as usize] |= 1 << i;
        }
    }
    let mut groups: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for (w, &m) in mask.iter().enumerate() {
        groups.entry(m).or_default().push(w as u64);
    }
    let cells = groups
        .into_values()
        .map(|words| ClopenSet::from_indices(alphabet, depth, words))
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::from_valid(alphabet, cells))
}

/// A finite clopen cover of `Ω`; members may overlap. Stored as a sorted
/// set of nonempty members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cover {
    #[serde(skip)]
    alphabet: Alphabet,
    members: Vec<ClopenSet>,
}

impl Cover {
    pub fn new(alphabet: Alphabet, members: Vec<ClopenSet>) -> Result<Self> {
        same_alphabet(alphabet, &members)?;
        let mut union = ClopenSet::empty(alphabet);
        for m in &members {
            union = union.union(m)?;
        }
        if !union.is_full() {
            let gap = union.complement().words().next().expect("nonempty complement");
            return Err(Error::invalid(format!("members do not cover the cylinder U:{gap}")));
        }
        Ok(Cover::from_valid(alphabet, members))
    }

    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        Cover::new(alphabet, parse_family(alphabet, text)?)
    }

    fn from_valid(alphabet: Alphabet, members: Vec<ClopenSet>) -> Self {
        let members: BTreeSet<ClopenSet> = members.into_iter().filter(|m| !m.is_empty()).collect();
        Cover { alphabet, members: members.into_iter().collect() }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn members(&self) -> &[ClopenSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn depth(&self) -> u32 {
        max_depth(&self.members)
    }

    fn bitsets(&self, depth: u32) -> Result<(u64, Vec<Vec<u64>>)> {
        let total = word_total(self.alphabet, depth)?;
        let bits = self.members.iter().map(|m| to_bits(m, depth, total)).collect::<Result<_>>()?;
        Ok((total, bits))
    }

    /// `𝒰 ∨ 𝒲`: all nonempty `U ∩ W`, deduplicated.
    pub fn join(&self, other: &Cover) -> Result<Cover> {
        if self.alphabet != other.alphabet {
            return Err(Error::invalid("covers over different alphabets"));
        }
        let depth = self.depth().max(other.depth());
        let (total, a) = self.bitsets(depth)?;
        let (_, b) = other.bitsets(depth)?;
        let work = (a.len() * b.len()) as u128 * total.div_ceil(64) as u128;
        if work > MAX_JOIN_WORK {
            return Err(Error::resource("cover join work", work, MAX_JOIN_WORK));
        }
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        for x in &a {
            for y in &b {
                let meet: Vec<u64> = x.iter().zip(y).map(|(p, q)| p & q).collect();
                if meet.iter().any(|&c| c != 0) {
                    seen.insert(meet);
                }
            }
        }
        let members = seen.iter().map(|bits| from_bits(self.alphabet, depth, bits)).collect::<Result<Vec<_>>>()?;
        Ok(Cover::from_valid(self.alphabet, members))
    }

    pub fn preimage(&self, t: &Transformation) -> Result<Cover> {
        self.preimage_iter(t, 1)
    }

    fn preimage_iter(&self, t: &Transformation, k: u32) -> Result<Cover> {
        let members = self.members.iter().map(|m| t.preimage_iter(m, k)).collect::<Result<Vec<_>>>()?;
        Ok(Cover::from_valid(self.alphabet, members))
    }

    /// Only the inclusion-maximal members; the minimal subcover size and
    /// every later join's minimal subcover size are unchanged.
    pub fn reduced(&self) -> Result<Cover> {
        let depth = self.depth();
        let (_, bits) = self.bitsets(depth)?;
        let keep = subcover::maximal_members(&bits);
        Ok(Cover { alphabet: self.alphabet, members: keep.into_iter().map(|i| self.members[i].clone()).collect() })
    }

    /// The `k`-fold dynamical joins for `k = 1..=n`, each reduced to its
    /// maximal members.
    pub fn dynamical_joins(&self, t: &Transformation, n: u32) -> Result<Vec<Cover>> {
        if n == 0 {
            return Err(Error::invalid("the number of join steps must be at least 1"));
        }
        word_total(self.alphabet, final_depth(self.depth(), t, n))?;
        let mut out = vec![self.reduced()?];
        for k in 1..n {
            let next = out[k as usize - 1].join(&self.preimage_iter(t, k)?)?.reduced()?;
            out.push(next);
        }
        Ok(out)
    }

    /// `N(𝒰)`: the least number of members covering `Ω`.
    pub fn min_subcover_size(&self) -> Result<usize> {
        let (total, bits) = self.bitsets(self.depth())?;
        subcover::min_cover_size(total, &bits)
    }

    /// `α(𝒰)`, the atom partition of the members.
    pub fn atoms(&self) -> Result<Partition> {
        partition_from_sets(self.alphabet, &self.members)
    }

    /// `self < finer`: every member of `finer` lies in some member of `self`.
    pub fn is_refined_by(&self, finer: &Cover) -> Result<bool> {
        for w in &finer.members {
            let mut inside = false;
            for u in &self.members {
                if w.is_subset(u)? {
                    inside = true;
                    break;
                }
            }
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl From<&Partition> for Cover {
    fn from(p: &Partition) -> Self {
        p.to_cover()
    }
}

impl fmt::Display for Cover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(ClopenSet::to_expr).collect();
        f.write_str(&parts.join(" | "))
    }
}

/// Atoms of up to `max_sets` random sets of depth `≤ max_depth`.
pub(crate) fn random_partition<R: Rng + ?Sized>(
    alphabet: Alphabet,
    rng: &mut R,
    max_sets: usize,
    max_depth: u32,
) -> Result<Partition> {
    let k = rng.gen_range(1..=max_sets);
    let sets = (0..k)
        .map(|_| {
            let depth = rng.gen_range(0..=max_depth);
            ClopenSet::random(alphabet, depth, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    partition_from_sets(alphabet, &sets)
}

/// Up to `max_members` random sets, plus the complement of their union
/// when they miss something.
pub(crate) fn random_cover<R: Rng + ?Sized>(
    alphabet: Alphabet,
    rng: &mut R,
    max_members: usize,
    max_depth: u32,
) -> Result<Cover> {
    let k = rng.gen_range(1..=max_members);
    let mut members = (0..k)
        .map(|_| {
            let depth = rng.gen_range(0..=max_depth);
            ClopenSet::random(alphabet, depth, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut union = ClopenSet::empty(alphabet);
    for m in &members {
        union = union.union(m)?;
    }
    if !union.is_full() {
        members.push(union.complement());
    }
    Cover::new(alphabet, members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn a(p: u32) -> Alphabet {
        Alphabet::new(p).unwrap()
    }

    fn set(p: u32, e: &str) -> ClopenSet {
        parse_set_expr(e, a(p)).unwrap()
    }

    fn part(p: u32, e: &str) -> Partition {
        Partition::parse(a(p), e).unwrap()
    }

    #[test]
    fn construction_rejects_overlap_and_gaps() {
        let err = Partition::parse(a(2), "U:0 | U:00 + U:1").unwrap_err();
        assert!(err.to_string().contains("overlap on word 00"), "{err}");
        let err = Partition::parse(a(3), "U:0 | U:1").unwrap_err();
        assert!(err.to_string().contains("do not cover word 2"), "{err}");
        let err = Cover::parse(a(3), "U:0 + U:1 | U:1").unwrap_err();
        assert!(err.to_string().contains("U:2"), "{err}");
    }

    #[test]
    fn atoms_of_small_families() {
        assert_eq!(partition_from_sets(a(2), &[set(2, "U:0")]).unwrap(), part(2, "U:0|U:1"));
        assert_eq!(partition_from_sets(a(2), &[set(2, "U:0"), set(2, "U:01")]).unwrap(), part(2, "U:00|U:01|U:1"));
        assert_eq!(partition_from_sets(a(2), &[ClopenSet::full(a(2))]).unwrap(), Partition::trivial(a(2)));
        let many = vec![ClopenSet::full(a(2)); 17];
        assert!(matches!(partition_from_sets(a(2), &many), Err(Error::Resource { .. })));
    }

    #[test]
    fn join_examples() {
        let alpha = part(2, "U:0|U:1");
        assert_eq!(alpha.join(&alpha).unwrap(), alpha);
        assert_eq!(alpha.join(&Partition::trivial(a(2))).unwrap(), alpha);
        let second = part(2, "U:00+U:10|U:01+U:11");
        assert_eq!(alpha.join(&second).unwrap(), Partition::cylinders(a(2), 2).unwrap());
        assert!(alpha.is_coarser_than(&alpha.join(&second).unwrap()).unwrap());
        assert!(!alpha.join(&second).unwrap().is_coarser_than(&alpha).unwrap());
    }

    #[test]
    fn dynamical_join_examples() {
        let shift = Transformation::shift(a(3));
        let alpha = Partition::cylinders(a(3), 1).unwrap();
        assert_eq!(alpha.dynamical_join(&shift, 1).unwrap(), alpha);
        assert_eq!(alpha.dynamical_join(&shift, 2).unwrap(), Partition::cylinders(a(3), 2).unwrap());
        let beta = part(3, "U:0|U:1+U:2");
        let b2 = beta.dynamical_join(&shift, 2).unwrap();
        assert_eq!(b2, part(3, "U:00|U:01+U:02|U:10+U:20|U:11+U:12+U:21+U:22"));
        assert!(matches!(alpha.dynamical_join(&shift, 0), Err(Error::InvalidArgument(_))));
        match alpha.dynamical_join(&shift, 16) {
            Err(Error::Resource { attempted, .. }) => assert!(attempted > MAX_WORDS as u128),
            other => panic!("expected a resource error, got {other:?}"),
        }
    }

    #[test]
    fn subcover_examples() {
        assert_eq!(part(3, "U:0|U:1|U:2").to_cover().min_subcover_size().unwrap(), 3);
        assert_eq!(Cover::parse(a(2), "ALL|U:0|U:1").unwrap().min_subcover_size().unwrap(), 1);
        let c = Cover::parse(a(3), "U:0+U:1|U:1+U:2|U:0+U:2").unwrap();
        assert_eq!(c.min_subcover_size().unwrap(), 2);
        assert_eq!(c.reduced().unwrap(), c);
        let d = Cover::parse(a(2), "ALL|U:0|U:1").unwrap().reduced().unwrap();
        assert_eq!(d.members(), &[ClopenSet::full(a(2))]);
    }

    #[test]
    fn cover_joins_reduce_to_maximal_members() {
        let shift = Transformation::shift(a(3));
        let c = Cover::parse(a(3), "U:0+U:1|U:1+U:2|U:0+U:2").unwrap();
        let joins = c.dynamical_joins(&shift, 2).unwrap();
        // each 2-window avoids one symbol at each position: 9 maximal members
        assert_eq!(joins[1].len(), 9);
        for j in &joins {
            let raw_min = j.min_subcover_size().unwrap();
            assert_eq!(j.reduced().unwrap().min_subcover_size().unwrap(), raw_min);
        }
    }

    /// Refinement does not pass to atoms once cover members overlap:
    /// `𝒲` refines `𝒰` but the atom `U:01+U:10` of `α(𝒰)` is not a union
    /// of atoms of `α(𝒲)`.
    #[test]
    fn refinement_does_not_pass_to_atoms_for_overlapping_covers() {
        let u = Cover::parse(a(2), "U:00+U:01+U:10|U:01+U:10+U:11").unwrap();
        let w = Cover::parse(a(2), "U:0|U:1").unwrap();
        assert!(u.is_refined_by(&w).unwrap());
        let (au, aw) = (u.atoms().unwrap(), w.atoms().unwrap());
        assert!(au.cells().contains(&set(2, "U:01+U:10")));
        assert!(!au.is_coarser_than(&aw).unwrap());
        assert!(!aw.is_coarser_than(&au).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn atoms_of_join_are_join_of_atoms(seed in any::<u64>(), p in 2u32..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_cover(a(p), &mut rng, 3, 3).unwrap();
            let w = random_cover(a(p), &mut rng, 3, 3).unwrap();
            let uw = u.join(&w).unwrap();
            prop_assert_eq!(uw.atoms().unwrap(), u.atoms().unwrap().join(&w.atoms().unwrap()).unwrap());
            // the refinement half holds for refinements of the form 𝒰 ∨ 𝒲
            prop_assert!(u.is_refined_by(&uw).unwrap());
            prop_assert!(u.atoms().unwrap().is_coarser_than(&uw.atoms().unwrap()).unwrap());
        }

        #[test]
        fn refinement_passes_to_atoms_for_partitions(seed in any::<u64>(), p in 2u32..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let alpha = random_partition(a(p), &mut rng, 2, 3).unwrap();
            let finer = alpha.join(&random_partition(a(p), &mut rng, 2, 3).unwrap()).unwrap();
            let (u, w) = (alpha.to_cover(), finer.to_cover());
            prop_assert!(u.is_refined_by(&w).unwrap());
            prop_assert!(u.atoms().unwrap().is_coarser_than(&w.atoms().unwrap()).unwrap());
            prop_assert_eq!(u.atoms().unwrap(), alpha);
        }

        #[test]
        fn join_is_common_refinement(seed in any::<u64>(), p in 2u32..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_partition(a(p), &mut rng, 2, 3).unwrap();
            let y = random_partition(a(p), &mut rng, 2, 3).unwrap();
            let j = x.join(&y).unwrap();
            prop_assert!(x.is_coarser_than(&j).unwrap());
            prop_assert!(y.is_coarser_than(&j).unwrap());
            prop_assert!(j.len() <= x.len() * y.len());
            prop_assert_eq!(&j, &y.join(&x).unwrap());
            // the cover join of partitions is the partition join
            prop_assert_eq!(x.to_cover().join(&y.to_cover()).unwrap(), j.to_cover());
        }

        #[test]
        fn subcover_matches_exhaustive_search(seed in any::<u64>(), p in 2u32..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_cover(a(p), &mut rng, 8, 3).unwrap();
            let members = c.members();
            let mut best = usize::MAX;
            for mask in 1u32..(1 << members.len()) {
                let mut union = ClopenSet::empty(a(p));
                for (i, m) in members.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        union = union.union(m).unwrap();
                    }
                }
                if union.is_full() {
                    best = best.min(mask.count_ones() as usize);
                }
            }
            prop_assert_eq!(c.min_subcover_size().unwrap(), best);
        }
    }
}

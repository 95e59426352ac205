use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MeasureContext;
use crate::report::{Check, Report};
use crate::shift::{parse_set_expr, Alphabet, ClopenSet, Word};

/// Largest depth for which an isomorphism table is materialized.
pub const MAX_ISO_DEPTH: u32 = 12;

/// A map of clopen algebras given by the images of every cylinder of length
/// at most `depth`; a set of depth `≤ depth` maps to the union of the images
/// of its words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureAlgebraIso {
    source: Alphabet,
    target: Alphabet,
    depth: u32,
    /// `images[n][w]` is the image of the cylinder of the length-`n` word
    /// with index `w`.
    images: Vec<Vec<ClopenSet>>,
}

impl MeasureAlgebraIso {
    pub fn from_images(source: Alphabet, target: Alphabet, depth: u32, images: Vec<Vec<ClopenSet>>) -> Result<Self> {
        check_depth(source, depth)?;
        if images.len() != depth as usize + 1 {
            return Err(Error::invalid(format!("expected image tables for depths 0..={depth}, got {}", images.len())));
        }
        for (n, level) in images.iter().enumerate() {
            let expected = source.count_words(n as u32).unwrap_or(u64::MAX);
            if level.len() as u64 != expected {
                return Err(Error::invalid(format!("depth {n} lists {} images, expected {expected}", level.len())));
            }
            if let Some(bad) = level.iter().find(|s| s.alphabet() != target) {
                return Err(Error::invalid(format!("image {bad} is not over the target alphabet")));
            }
        }
        Ok(MeasureAlgebraIso { source, target, depth, images })
    }

    /// Build from a rule giving the image of each cylinder.
    pub fn from_fn(
        source: Alphabet,
        target: Alphabet,
        depth: u32,
        mut image: impl FnMut(&Word) -> Result<ClopenSet>,
    ) -> Result<Self> {
        check_depth(source, depth)?;
        let images = (0..=depth)
            .map(|n| {
                (0..source.count_words(n).expect("depth checked"))
                    .map(|w| image(&Word::from_index(source, w, n)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MeasureAlgebraIso::from_images(source, target, depth, images)
    }

    pub fn identity(alphabet: Alphabet, depth: u32) -> Result<Self> {
        MeasureAlgebraIso::from_fn(alphabet, alphabet, depth, |w| ClopenSet::cylinder(alphabet, w))
    }

    pub fn source(&self) -> Alphabet {
        self.source
    }

    pub fn target(&self) -> Alphabet {
        self.target
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn cylinder_image(&self, word: &Word) -> Result<&ClopenSet> {
        let n = word.len() as u32;
        if n > self.depth {
            return Err(Error::resource("isomorphism depth", n as u128, self.depth as u128));
        }
        Ok(&self.images[n as usize][word.index(self.source) as usize])
    }

    /// `Φ(A)` for any clopen `A` of depth at most `depth`.
    pub fn apply(&self, set: &ClopenSet) -> Result<ClopenSet> {
        if set.alphabet() != self.source {
            return Err(Error::invalid("set is not over the source alphabet"));
        }
        let n = set.depth();
        if n > self.depth {
            return Err(Error::resource("isomorphism depth", n as u128, self.depth as u128));
        }
        let level = &self.images[n as usize];
        set.indices().iter().try_fold(ClopenSet::empty(self.target), |acc, &w| acc.union(&level[w as usize]))
    }

    /// Structural invariants: at each depth the images of the cylinders are
    /// nonempty, pairwise disjoint and cover the target (so unions and
    /// complements are preserved); each image is the union of its children's
    /// images; every target cylinder of depth `≤ depth` is reached as a union
    /// of images of deepest-level cylinders.
    pub fn check_invariants(&self) -> Result<Report> {
        let mut report = Report::default();
        let mut partition = Check::new("partition");
        let mut compatible = Check::new("compatible");
        for (n, level) in self.images.iter().enumerate() {
            let mut covered = ClopenSet::empty(self.target);
            for (w, image) in level.iter().enumerate() {
                let name = || Word::from_index(self.source, w as u64, n as u32).to_digits(self.source);
                let disjoint = covered.is_disjoint(image)?;
                partition.record(!image.is_empty() && disjoint, || {
                    format!("image of U_{} = {image} is empty or overlaps an earlier image", name())
                });
                covered = covered.union(image)?;
            }
            partition.record(covered.is_full(), || format!("depth-{n} images miss {}", covered.complement()));
            if n < self.depth as usize {
                let p = self.source.size() as usize;
                for (w, image) in level.iter().enumerate() {
                    let children = self.images[n + 1][w * p..(w + 1) * p]
                        .iter()
                        .try_fold(ClopenSet::empty(self.target), |acc, c| acc.union(c))?;
                    compatible.record(&children == image, || {
                        let word = Word::from_index(self.source, w as u64, n as u32);
                        format!("U_{}: image {image}, children give {children}", word.to_digits(self.source))
                    });
                }
            }
        }
        report.push(partition);
        report.push(compatible);

        let mut onto = Check::new("surjective");
        let deepest = &self.images[self.depth as usize];
        for n in 0..=self.depth {
            for w in 0..self.target.count_words(n).unwrap_or(0) {
                let cyl = ClopenSet::cylinder(self.target, &Word::from_index(self.target, w, n))?;
                let mut inside = ClopenSet::empty(self.target);
                for image in deepest {
                    if image.is_subset(&cyl)? {
                        inside = inside.union(image)?;
                    }
                }
                onto.record(inside == cyl, || format!("target {cyl} is not a union of images"));
            }
        }
        report.push(onto);
        Ok(report)
    }

    /// `ν(Φ(U_w)) = μ(U_w)` and `‖Φ(U_w)‖_ν = ‖U_w‖_μ` for every cylinder.
    pub fn check_measure_preserving(&self, mu: &MeasureContext, nu: &MeasureContext) -> Result<Report> {
        if mu.alphabet() != self.source || nu.alphabet() != self.target {
            return Err(Error::invalid("measures do not match the isomorphism alphabets"));
        }
        let mut measure = Check::new("measure-preserving");
        let mut norm = Check::new("norm-invariant");
        for (n, level) in self.images.iter().enumerate() {
            for (w, image) in level.iter().enumerate() {
                let word = Word::from_index(self.source, w as u64, n as u32);
                let cyl = ClopenSet::cylinder(self.source, &word)?;
                let (a, b) = (mu.measure_of(&cyl)?, nu.measure_of(image)?);
                measure.record(a == b, || format!("U_{}: mu = {a}, nu(image) = {b}", word.to_digits(self.source)));
                let (na, nb) = (mu.norm_of(&cyl)?, nu.norm_of(image)?);
                norm.record(na == nb, || format!("U_{}: {na} vs {nb}", word.to_digits(self.source)));
            }
        }
        let mut report = Report::default();
        report.push(measure);
        report.push(norm);
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&IsoRepr::from(self)).expect("iso serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: IsoRepr = serde_json::from_str(text).map_err(|e| Error::invalid(format!("isomorphism: {e}")))?;
        repr.build()
    }
}

fn check_depth(alphabet: Alphabet, depth: u32) -> Result<()> {
    if depth > MAX_ISO_DEPTH {
        return Err(Error::resource("isomorphism depth", depth as u128, MAX_ISO_DEPTH as u128));
    }
    let total: u64 = (0..=depth).map(|n| alphabet.count_words(n).unwrap_or(u64::MAX)).sum();
    if total > 1 << 20 {
        return Err(Error::resource("isomorphism table size", total as u128, 1 << 20));
    }
    Ok(())
}

/// `Φ(U_{a_0…a_{n-1}}) = U_{π(a_0)…π(a_{n-1})}`.
pub fn iso_from_permutation(alphabet: Alphabet, pi: &[u8], depth: u32) -> Result<MeasureAlgebraIso> {
    crate::transform::Transformation::permutation(alphabet, pi.to_vec())?;
    MeasureAlgebraIso::from_fn(alphabet, alphabet, depth, |w| {
        ClopenSet::cylinder(alphabet, &Word::new(alphabet, w.symbols().iter().map(|&s| pi[s as usize]).collect())?)
    })
}

/// Relabel consecutive length-`k` blocks through `table`, a permutation of
/// `Σ^k` indexed by block. A cylinder whose length is not a multiple of
/// `k` maps to the union over its extensions to the next multiple.
pub fn iso_from_block_map(alphabet: Alphabet, k: u32, table: &[Word], depth: u32) -> Result<MeasureAlgebraIso> {
    if k == 0 {
        return Err(Error::invalid("block length must be positive"));
    }
    let blocks =
        alphabet.count_words(k).filter(|&n| n <= 1 << 16).ok_or_else(|| Error::invalid("block length too large"))?;
    if table.len() as u64 != blocks {
        return Err(Error::invalid(format!("block table has {} entries, expected {blocks}", table.len())));
    }
    let mut seen = vec![false; blocks as usize];
    for b in table {
        if b.len() != k as usize || b.symbols().iter().any(|&s| alphabet.check(s).is_err()) {
            return Err(Error::invalid(format!("block image {b} is not a length-{k} word")));
        }
        if std::mem::replace(&mut seen[b.index(alphabet) as usize], true) {
            return Err(Error::invalid(format!("block image {b} repeated")));
        }
    }
    let relabel = |w: &[u8]| -> Vec<u8> {
        w.chunks(k as usize)
            .flat_map(|block| {
                table[Word::new(alphabet, block.to_vec()).expect("valid").index(alphabet) as usize].symbols().to_vec()
            })
            .collect()
    };
    MeasureAlgebraIso::from_fn(alphabet, alphabet, depth, |w| {
        let n = w.len() as u32;
        let padded = n.div_ceil(k) * k;
        let cyl = ClopenSet::cylinder(alphabet, w)?;
        let words = cyl.refine_to_depth(padded)?.into_iter().map(|idx| {
            Word::new(alphabet, relabel(Word::from_index(alphabet, idx, padded).symbols())).map(|x| x.index(alphabet))
        });
        ClopenSet::from_indices(alphabet, padded, words.collect::<Result<Vec<_>>>()?)
    })
}

/// JSON form: per depth, a map from source word to target set expression.
#[derive(Debug, Serialize, Deserialize)]
struct IsoRepr {
    source_p: u32,
    target_p: u32,
    depth: u32,
    images: Vec<BTreeMap<String, String>>,
}

impl From<&MeasureAlgebraIso> for IsoRepr {
    fn from(iso: &MeasureAlgebraIso) -> Self {
        let images = iso
            .images
            .iter()
            .enumerate()
            .map(|(n, level)| {
                level
                    .iter()
                    .enumerate()
                    .map(|(w, set)| {
                        (Word::from_index(iso.source, w as u64, n as u32).to_digits(iso.source), set.to_expr())
                    })
                    .collect()
            })
            .collect();
        IsoRepr { source_p: iso.source.size(), target_p: iso.target.size(), depth: iso.depth, images }
    }
}

impl IsoRepr {
    fn build(self) -> Result<MeasureAlgebraIso> {
        let source = Alphabet::new(self.source_p)?;
        let target = Alphabet::new(self.target_p)?;
        check_depth(source, self.depth)?;
        if self.images.len() != self.depth as usize + 1 {
            return Err(Error::invalid("one image map per depth 0..=depth is required"));
        }
        MeasureAlgebraIso::from_fn(source, target, self.depth, |w| {
            let key = w.to_digits(source);
            let expr =
                self.images[w.len()].get(&key).ok_or_else(|| Error::invalid(format!("no image for word {key:?}")))?;
            parse_set_expr(expr, target)
        })
    }
}

//! Independent brute-force evaluation of `‖A‖ = sup_{B ⊆ A} |μ(B)|_ℓ`
//! for Bernoulli measures.
//!
//! Cylinder masses are recomputed from the raw weights with plain rational
//! arithmetic. For a set `A` refined to depth `d`, all sub-unions `B` are
//! enumerated through their masses modulo `ℓ^K` after scaling by the
//! smallest valuation in `A`: every subset sum lands in the reachable
//! residue set, so the least valuation of a nonzero reachable residue is
//! the least valuation of any `μ(B)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{Prime, UltraNorm};
use crate::error::{Error, Result};

/// Residues are tracked modulo `ℓ^K` with this `K`.
const RESIDUE_DIGITS: u32 = 2;

/// Valuation and unit part (mod `ℓ^K`) of one cylinder mass.
#[derive(Debug, Clone, Copy)]
struct Mass {
    valuation: i64,
    unit: u64,
}

pub struct NormOracle {
    ell: Prime,
    modulus: u64,
    depth: u32,
    p: u64,
    /// Indexed by depth-`depth` word index; `None` for zero mass.
    masses: Vec<Option<Mass>>,
}

/// `(v_ℓ(x), x / ℓ^v)` for nonzero `x`.
fn split(x: &BigRational, ell: &BigInt) -> (i64, BigRational) {
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let mut v = 0i64;
    while n.is_multiple_of(ell) {
        n /= ell;
        v += 1;
    }
    while d.is_multiple_of(ell) {
        d /= ell;
        v -= 1;
    }
    (v, BigRational::new(n, d))
}

fn residue(unit: &BigRational, modulus: u64) -> u64 {
    let m = BigInt::from(modulus);
    let n = unit.numer().mod_floor(&m);
    let d = unit.denom().mod_floor(&m);
    let egcd = d.extended_gcd(&m);
    assert!(egcd.gcd.is_one(), "unit part has a denominator divisible by the prime");
    let inv = egcd.x.mod_floor(&m);
    let r = (n * inv).mod_floor(&m);
    u64::try_from(r).expect("residue below modulus")
}

impl NormOracle {
    /// Masses of all depth-`depth` cylinders for weights `q` over `ℓ`.
    pub fn new(weights: &[BigRational], ell: Prime, depth: u32) -> Result<Self> {
        let p = weights.len() as u64;
        let total = p
            .checked_pow(depth)
            .filter(|&t| t <= 1 << 20)
            .ok_or_else(|| Error::resource("oracle cylinders", u128::from(p).pow(depth), 1 << 20))?;
        let ell_big = BigInt::from(ell.get());
        let modulus = ell.get().pow(RESIDUE_DIGITS);
        let mut masses = Vec::with_capacity(total as usize);
        for w in 0..total {
            let mut mass = BigRational::one();
            let mut rest = w;
            for _ in 0..depth {
                mass *= &weights[(rest % p) as usize];
                rest /= p;
            }
            masses.push(if mass.is_zero() {
                None
            } else {
                let (valuation, unit) = split(&mass, &ell_big);
                Some(Mass { valuation, unit: residue(&unit, modulus) })
            });
        }
        Ok(NormOracle { ell, modulus, depth, p, masses })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn alphabet_size(&self) -> u64 {
        self.p
    }

    /// `sup |μ(B)|_ℓ` over unions `B` of the given depth-`depth` words.
    pub fn sup_norm(&self, words: &[u64]) -> Result<UltraNorm> {
        let ell = self.ell.get();
        let present: Vec<Mass> = words.iter().filter_map(|&w| self.masses[w as usize]).collect();
        let Some(base) = present.iter().map(|m| m.valuation).min() else {
            return Ok(UltraNorm::Zero);
        };
        let m = self.modulus;
        // reachable[r]: some nonempty sub-union has scaled mass ≡ r
        let mut reachable = vec![false; m as usize];
        for mass in &present {
            let shift = mass.valuation - base;
            if shift >= RESIDUE_DIGITS as i64 {
                continue; // ≡ 0 and adds nothing modulo ℓ^K
            }
            let x = mass.unit * ell.pow(shift as u32) % m;
            let before = reachable.clone();
            reachable[x as usize] = true;
            for (r, &hit) in before.iter().enumerate() {
                if hit {
                    reachable[((r as u64 + x) % m) as usize] = true;
                }
            }
        }
        let least = (1..m)
            .filter(|&r| reachable[r as usize])
            .map(|r| {
                let mut v = 0i64;
                let mut r = r;
                while r % ell == 0 {
                    r /= ell;
                    v += 1;
                }
                v
            })
            .min();
        match least {
            Some(v) => Ok(UltraNorm::power(self.ell, base + v)),
            None => Err(Error::Internal(format!(
                "every sub-union mass vanishes modulo {ell}^{RESIDUE_DIGITS}; raise the residue precision"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> BigRational {
        s.parse().unwrap()
    }

    #[test]
    fn cancellation_is_seen_by_enumeration() {
        // masses 3 and -3 over ℓ = 3 at depth 1 with weights (3, -3)
        let ell = Prime::new(3).unwrap();
        let o = NormOracle::new(&[r("3"), r("-3")], ell, 1).unwrap();
        assert_eq!(o.sup_norm(&[0, 1]).unwrap(), UltraNorm::power(ell, 1));
        assert_eq!(o.sup_norm(&[]).unwrap(), UltraNorm::Zero);
        let o = NormOracle::new(&[r("-2"), r("3")], ell, 2).unwrap();
        // words 00, 01, 10, 11 have masses 4, -6, -6, 9
        assert_eq!(o.sup_norm(&[3]).unwrap(), UltraNorm::power(ell, 2));
        assert_eq!(o.sup_norm(&[1, 2, 3]).unwrap(), UltraNorm::power(ell, 1));
        assert_eq!(o.sup_norm(&[0, 3]).unwrap(), UltraNorm::one(ell));
    }
}

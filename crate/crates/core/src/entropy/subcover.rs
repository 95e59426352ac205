//! Exact minimum set cover over word bitsets.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Largest family left for the exact search after reductions.
pub const MAX_SEARCH_MEMBERS: usize = 24;

fn count(bits: &[u64]) -> u32 {
    bits.iter().map(|c| c.count_ones()).sum()
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn meet(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn is_zero(bits: &[u64]) -> bool {
    bits.iter().all(|&c| c == 0)
}

/// Indices of the inclusion-maximal members, one per distinct set,
/// in original order.
pub(crate) fn maximal_members(sets: &[Vec<u64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(count(&sets[i])));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        if !kept.iter().any(|&k| is_subset(&sets[i], &sets[k])) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

/// Size of a smallest subfamily whose union is the `total`-element universe.
///
/// Dominated members are dropped and members that alone cover some word
/// are forced, repeatedly; the residual family is solved by branching on
/// the uncovered word with the fewest candidates.
pub(crate) fn min_cover_size(total: u64, sets: &[Vec<u64>]) -> Result<usize> {
    let chunks = total.div_ceil(64) as usize;
    let mut uncovered = vec![u64::MAX; chunks];
    if !total.is_multiple_of(64) {
        uncovered[chunks - 1] = (1u64 << (total % 64)) - 1;
    }
    let mut family: Vec<Vec<u64>> = sets.to_vec();
    let mut forced = 0usize;
    loop {
        let restricted: BTreeSet<Vec<u64>> =
            family.iter().map(|s| meet(s, &uncovered)).filter(|s| !is_zero(s)).collect();
        let restricted: Vec<Vec<u64>> = restricted.into_iter().collect();
        family = maximal_members(&restricted).into_iter().map(|i| restricted[i].clone()).collect();
        if is_zero(&uncovered) {
            return Ok(forced);
        }
        let mut changed = false;
        for w in super::partition::ones(&uncovered.clone()).collect::<Vec<_>>() {
            let (c, bit) = ((w / 64) as usize, 1u64 << (w % 64));
            if uncovered[c] & bit == 0 {
                continue;
            }
            let holders: Vec<usize> = (0..family.len()).filter(|&i| family[i][c] & bit != 0).collect();
            match holders.as_slice() {
                [] => return Err(Error::invalid("the family does not cover every word")),
                [only] => {
                    for (u, s) in uncovered.iter_mut().zip(&family[*only]) {
                        *u &= !s;
                    }
                    forced += 1;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    if family.len() > MAX_SEARCH_MEMBERS {
        return Err(Error::resource("cover members after reduction", family.len() as u128, MAX_SEARCH_MEMBERS as u128));
    }
    let mut best = greedy(&family, &uncovered);
    search(&family, &uncovered, 0, &mut best);
    Ok(forced + best)
}

fn greedy(family: &[Vec<u64>], uncovered: &[u64]) -> usize {
    let mut left = uncovered.to_vec();
    let mut used = 0;
    while !is_zero(&left) {
        let pick = family.iter().max_by_key(|s| count(&meet(s, &left))).expect("nonempty family");
        for (u, s) in left.iter_mut().zip(pick) {
            *u &= !s;
        }
        used += 1;
    }
    used
}

fn search(family: &[Vec<u64>], uncovered: &[u64], chosen: usize, best: &mut usize) {
    if is_zero(uncovered) {
        *best = (*best).min(chosen);
        return;
    }
    if chosen + 1 >= *best {
        return;
    }
    let need = count(uncovered) as usize;
    let widest = family.iter().map(|s| count(&meet(s, uncovered))).max().unwrap_or(0) as usize;
    if widest == 0 || chosen + need.div_ceil(widest) >= *best {
        return;
    }
    // branch on the uncovered word with the fewest candidates
    let mut pivot: Option<(usize, Vec<usize>)> = None;
    for w in super::partition::ones(uncovered) {
        let (c, bit) = ((w / 64) as usize, 1u64 << (w % 64));
        let holders: Vec<usize> = (0..family.len()).filter(|&i| family[i][c] & bit != 0).collect();
        if pivot.as_ref().is_none_or(|(n, _)| holders.len() < *n) {
            let n = holders.len();
            pivot = Some((n, holders));
            if n <= 1 {
                break;
            }
        }
    }
    let (_, mut holders) = pivot.expect("uncovered word exists");
    holders.sort_by_key(|&i| std::cmp::Reverse(count(&meet(&family[i], uncovered))));
    for i in holders {
        let left: Vec<u64> = uncovered.iter().zip(&family[i]).map(|(u, s)| u & !s).collect();
        search(family, &left, chosen + 1, best);
    }
}

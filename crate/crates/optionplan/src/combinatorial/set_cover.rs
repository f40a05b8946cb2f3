//! Greedy set cover and its exact brute-force oracle.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A set-cover instance: a universe of elements and an indexed family of
/// subsets, each contained in the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCoverInstance {
    pub universe: BTreeSet<usize>,
    pub subsets: Vec<BTreeSet<usize>>,
}

impl SetCoverInstance {
    pub fn new(universe: BTreeSet<usize>, subsets: Vec<BTreeSet<usize>>) -> Result<Self> {
        for (i, x) in subsets.iter().enumerate() {
            if !x.is_subset(&universe) {
                return Err(Error::InvalidInstance(format!(
                    "subset {i} contains elements outside the universe"
                )));
            }
        }
        Ok(SetCoverInstance { universe, subsets })
    }
}

/// Chvatal's greedy cover: repeatedly pick the subset covering the most
/// still-uncovered elements, ties broken by lowest subset index. Returns the
/// chosen subset indices in pick order.
pub fn greedy_set_cover(inst: &SetCoverInstance) -> Result<Vec<usize>> {
    let mut uncovered = inst.universe.clone();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let mut best: Option<(usize, usize)> = None; // (gain, index)
        for (i, x) in inst.subsets.iter().enumerate() {
            let gain = x.intersection(&uncovered).count();
            if gain > 0 && best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, i));
            }
        }
        match best {
            Some((_, i)) => {
                for e in &inst.subsets[i] {
                    uncovered.remove(e);
                }
                chosen.push(i);
            }
            None => {
                let orphan = *uncovered.iter().next().expect("uncovered is nonempty");
                return Err(Error::UncoveredElement(orphan));
            }
        }
    }
    Ok(chosen)
}

/// Exact minimum-cardinality cover, lexicographically smallest among the
/// minima. Supports up to 20 subsets.
pub fn brute_force_set_cover(inst: &SetCoverInstance) -> Result<Vec<usize>> {
    const MAX_SUBSETS: usize = 20;
    let m = inst.subsets.len();
    if m > MAX_SUBSETS {
        return Err(Error::TooManySubsets {
            max: MAX_SUBSETS,
            got: m,
        });
    }
    if inst.universe.is_empty() {
        return Ok(Vec::new());
    }
    for size in 1..=m {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mut covered = BTreeSet::new();
            for &i in &combo {
                covered.extend(inst.subsets[i].iter().copied());
            }
            if inst.universe.is_subset(&covered) {
                return Ok(combo);
            }
            if !next_combination(&mut combo, m) {
                break;
            }
        }
    }
    let orphan = *inst
        .universe
        .iter()
        .find(|e| !inst.subsets.iter().any(|x| x.contains(e)))
        .expect("some element is uncoverable");
    Err(Error::UncoveredElement(orphan))
}

/// Advance `combo` to the next k-combination of `0..m` in lexicographic
/// order. Returns false when exhausted.
pub(crate) fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < m - (k - i) {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

//! Asymmetric k-center: bottleneck approximation plus an exact oracle.
//!
//! The approximation scans candidate radii in ascending order. For each
//! radius it builds the cover digraph (`c` covers `p` iff `d(p, c) <= r`)
//! and runs chained greedy-halving rounds: a full greedy cover of the
//! active points, whose chosen centers become the next round's active
//! points. Chaining shrinks the active set geometrically whenever the
//! radius is feasible, at the cost of a bounded expansion of the covering
//! radius. The first radius whose procedure needs at most `k` centers is
//! accepted, and the returned radius is recomputed exactly from the final
//! centers.

use crate::combinatorial::set_cover::next_combination;
use crate::error::{Error, Result};

/// Points, their pairwise asymmetric distances, and a center budget.
///
/// `dist` is indexed by position in `points`; the values in `points` are
/// opaque identifiers carried through to the output. The distances are
/// expected to satisfy the directed triangle inequality; violations are
/// tolerated but reported by [`KCenterInstance::triangle_violation`].
#[derive(Debug, Clone)]
pub struct KCenterInstance {
    pub points: Vec<usize>,
    pub dist: Vec<Vec<usize>>,
    pub k: usize,
}

impl KCenterInstance {
    pub fn new(points: Vec<usize>, dist: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        let n = points.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput(format!(
                "distance matrix must be {n}x{n}"
            )));
        }
        for (i, row) in dist.iter().enumerate() {
            if row[i] != 0 {
                return Err(Error::InvalidInput(format!(
                    "self-distance of point {i} must be 0"
                )));
            }
        }
        let inst = KCenterInstance { points, dist, k };
        if let Some((a, b, c)) = inst.triangle_violation() {
            eprintln!(
                "warning: k-center distances violate the triangle inequality at ({a}, {b}, {c}); \
                 the suboptimality bound does not apply"
            );
        }
        Ok(inst)
    }

    /// First triple (a, b, c) with `d(a, c) > d(a, b) + d(b, c)`, if any.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.points.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.dist[a][c] > self.dist[a][b] + self.dist[b][c] {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    fn radius_of(&self, centers: &[usize]) -> usize {
        (0..self.points.len())
            .map(|p| centers.iter().map(|&c| self.dist[p][c]).min().unwrap())
            .max()
            .unwrap_or(0)
    }
}

/// Bounded-suboptimal asymmetric k-center. Returns at most `k` centers (as
/// point identifiers) and the exact covering radius of the returned set.
pub fn asym_k_center(inst: &KCenterInstance) -> Result<(Vec<usize>, usize)> {
    let n = inst.points.len();
    if n == 0 {
        return Ok((Vec::new(), 0));
    }
    if inst.k >= n {
        let centers: Vec<usize> = (0..n).collect();
        return finish(inst, centers);
    }
    let mut radii: Vec<usize> = inst.dist.iter().flatten().copied().collect();
    radii.sort_unstable();
    radii.dedup();
    for &r in &radii {
        if let Some(centers) = cover_within(inst, r) {
            if centers.len() <= inst.k {
                return finish(inst, centers);
            }
        }
    }
    // The largest distinct distance always succeeds with a single center.
    unreachable!("radius scan exhausted without a cover")
}

fn finish(inst: &KCenterInstance, centers: Vec<usize>) -> Result<(Vec<usize>, usize)> {
    let radius = inst.radius_of(&centers);
    Ok((centers.iter().map(|&c| inst.points[c]).collect(), radius))
}

/// Chained greedy-halving rounds at a fixed radius. Returns center
/// positions, or None when a round makes no progress (the radius is too
/// small to shrink the active set).
fn cover_within(inst: &KCenterInstance, r: usize) -> Option<Vec<usize>> {
    let mut active: Vec<usize> = (0..inst.points.len()).collect();
    loop {
        if active.len() <= inst.k {
            return Some(active);
        }
        let cover = greedy_cover_round(inst, &active, r);
        if cover.len() >= active.len() {
            return None;
        }
        active = cover;
    }
}

/// One full greedy cover of `active` using centers drawn from `active`,
/// covering within radius `r`. Ties broken by lowest position.
fn greedy_cover_round(inst: &KCenterInstance, active: &[usize], r: usize) -> Vec<usize> {
    let mut uncovered: Vec<bool> = vec![true; active.len()];
    let mut remaining = active.len();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let mut best_gain = 0;
        let mut best_c = active[0];
        for &c in active {
            let gain = active
                .iter()
                .enumerate()
                .filter(|&(pi, &p)| uncovered[pi] && inst.dist[p][c] <= r)
                .count();
            if gain > best_gain {
                best_gain = gain;
                best_c = c;
            }
        }
        debug_assert!(best_gain > 0, "every point covers itself");
        for (pi, &p) in active.iter().enumerate() {
            if uncovered[pi] && inst.dist[p][best_c] <= r {
                uncovered[pi] = false;
                remaining -= 1;
            }
        }
        chosen.push(best_c);
    }
    chosen.sort_unstable();
    chosen
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    out
}

/// Exact k-center by exhaustive enumeration, deterministic lexicographic
/// tie-break. Requires `C(n, k) <= budget`.
pub fn brute_force_k_center(inst: &KCenterInstance, budget: u64) -> Result<(Vec<usize>, usize)> {
    let n = inst.points.len();
    if n == 0 {
        return Ok((Vec::new(), 0));
    }
    let k = inst.k.min(n);
    let required = binomial(n, k);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded {
            required,
            budget,
        });
    }
    let mut combo: Vec<usize> = (0..k).collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    loop {
        let radius = inst.radius_of(&combo);
        if best.as_ref().is_none_or(|(r, _)| radius < *r) {
            best = Some((radius, combo.clone()));
        }
        if !next_combination(&mut combo, n) {
            break;
        }
    }
    let (radius, centers) = best.expect("at least one combination");
    Ok((centers.iter().map(|&c| inst.points[c]).collect(), radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Pairwise distances of the six-state funnel domain.
    const TABLE: [[usize; 6]; 6] = [
        [0, 1, 3, 3, 2, 3],
        [2, 0, 2, 2, 1, 2],
        [3, 3, 0, 1, 2, 3],
        [2, 2, 2, 0, 1, 2],
        [1, 1, 1, 1, 0, 1],
        [0, 0, 0, 0, 0, 0],
    ];

    fn table_instance(k: usize) -> KCenterInstance {
        let dist = TABLE.iter().map(|row| row.to_vec()).collect();
        KCenterInstance::new((0..6).collect(), dist, k).unwrap()
    }

    #[test]
    fn one_center_is_the_funnel_neck() {
        let (centers, radius) = asym_k_center(&table_instance(1)).unwrap();
        assert_eq!(centers, vec![4]); // s5
        assert_eq!(radius, 2);
    }

    #[test]
    fn two_centers_reach_radius_one() {
        let (centers, radius) = asym_k_center(&table_instance(2)).unwrap();
        assert_eq!(radius, 1);
        assert_eq!(centers, vec![1, 3]); // s2 and s4
    }

    #[test]
    fn budget_at_least_n_makes_every_point_a_center() {
        let (centers, radius) = asym_k_center(&table_instance(6)).unwrap();
        assert_eq!(centers.len(), 6);
        assert_eq!(radius, 0);
    }

    #[test]
    fn brute_force_confirms_the_optima() {
        let (_, r1) = brute_force_k_center(&table_instance(1), 1_000_000).unwrap();
        assert_eq!(r1, 2);
        let (_, r2) = brute_force_k_center(&table_instance(2), 1_000_000).unwrap();
        assert_eq!(r2, 1);
        let (centers, r6) = brute_force_k_center(&table_instance(6), 1_000_000).unwrap();
        assert_eq!((centers.len(), r6), (6, 0));
    }

    #[test]
    fn budget_is_enforced() {
        let inst = table_instance(3);
        assert!(matches!(
            brute_force_k_center(&inst, 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn triangle_check_reports_violations() {
        assert_eq!(table_instance(1).triangle_violation(), None);
        let bad = KCenterInstance::new(
            vec![0, 1, 2],
            vec![vec![0, 1, 9], vec![1, 0, 1], vec![9, 1, 0]],
            1,
        )
        .unwrap();
        assert_eq!(bad.triangle_violation(), Some((0, 1, 2)));
    }

    #[test]
    fn zero_k_rejected() {
        let dist = vec![vec![0]];
        assert!(matches!(
            KCenterInstance::new(vec![0], dist, 0),
            Err(Error::ZeroK)
        ));
    }
}

//! The asymmetric convergence distance `d(s, s')`.
//!
//! `d(s, s')` is the number of extra sweeps state `s` needs to become and
//! stay epsilon-optimal once `s'` is held at its optimal value from sweep
//! zero, capped at one less than the option-free count for `s`. Each column
//! is produced by a pinned value-iteration run; pivots are independent, so
//! the matrix is computed one pinned run per pivot, in parallel when the
//! `parallel` feature is enabled.
//!
//! Conventions: the goal counts as converging on the first sweep, so its
//! option-free entry is 1 and every matrix entry is finite and bounded by
//! `no_option(s) - 1`.

use crate::error::Result;
use crate::exec;
use crate::mdp::Mdp;
use crate::planner::{run_sweeps, solve_optimal, vstar_tolerance, ValueFunction};

/// The full pairwise convergence-distance table plus the option-free
/// per-state counts it is capped by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    /// d[s][s'] for all state pairs, goal row and column included.
    pub d: Vec<Vec<usize>>,
    /// Option-free convergence sweeps per state (goal floored to 1).
    pub no_option: Vec<usize>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.no_option.len()
    }

    /// Max over `points` of the min distance to any of `centers`.
    pub fn coverage_radius(&self, points: &[usize], centers: &[usize]) -> usize {
        points
            .iter()
            .map(|&s| {
                centers
                    .iter()
                    .map(|&c| self.d[s][c])
                    .min()
                    .unwrap_or(self.no_option[s].saturating_sub(1))
            })
            .max()
            .unwrap_or(0)
    }
}

/// Option-free convergence sweeps per state: the per-state iteration counts
/// of a plain measured run started from zero.
pub fn distance_no_options(mdp: &Mdp, epsilon: f64) -> Result<Vec<usize>> {
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    no_option_counts(mdp, epsilon, &vstar)
}

fn no_option_counts(mdp: &Mdp, epsilon: f64, vstar: &ValueFunction) -> Result<Vec<usize>> {
    let v0 = vec![0.0; mdp.n_states()];
    let run = run_sweeps(mdp, &[], epsilon, &v0, None, &vstar.values)?;
    Ok(run.stays.iter().map(|&b| b.max(1)).collect())
}

/// Compute the full distance matrix by running one pinned sweep per pivot.
pub fn distance_matrix(mdp: &Mdp, epsilon: f64) -> Result<DistanceMatrix> {
    distance_matrix_impl(mdp, epsilon, false)
}

/// Sequential reference implementation, exposed for the benchmark suite and
/// for schedule-independence tests.
pub fn distance_matrix_seq(mdp: &Mdp, epsilon: f64) -> Result<DistanceMatrix> {
    distance_matrix_impl(mdp, epsilon, true)
}

fn distance_matrix_impl(mdp: &Mdp, epsilon: f64, force_seq: bool) -> Result<DistanceMatrix> {
    let n = mdp.n_states();
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    let no_option = no_option_counts(mdp, epsilon, &vstar)?;
    let v0 = vec![0.0; n];
    let column = |pivot: usize| -> Result<Vec<usize>> {
        let run = run_sweeps(mdp, &[], epsilon, &v0, Some(pivot), &vstar.values)?;
        Ok(run.stays)
    };
    let columns: Vec<Result<Vec<usize>>> = if force_seq {
        exec::map_indices_seq(n, column)
    } else {
        exec::map_indices(n, column)
    };
    let mut pinned = Vec::with_capacity(n);
    for col in columns {
        pinned.push(col?);
    }
    // pinned[j][i] is the stays index of state i with pivot j; the matrix is
    // indexed d[i][j].
    let d = (0..n)
        .map(|i| {
            let cap = no_option[i] - 1;
            (0..n).map(|j| pinned[j][i].min(cap)).collect()
        })
        .collect();
    Ok(DistanceMatrix { d, no_option })
}

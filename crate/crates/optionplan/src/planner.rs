//! Synchronous value iteration over primitive actions and point options,
//! plus the convergence-iteration metric the discovery algorithms optimize.
//!
//! A point option is backed up in one step through its multi-time model:
//! `Q(s, o) = R_gamma(s, o) + term_discount * V(term)`. The iteration count
//! of a run is the smallest sweep index from which every state's value is
//! epsilon-optimal and remains so; per-state indices are tracked the same
//! way. A run always counts at least one sweep, so the degenerate
//! goal-only problem reports one iteration.

use crate::error::{Error, Result};
use crate::mdp::Mdp;

/// Comparison slack used when `epsilon == 0`: values count as optimal when
/// they match the optimum within this tolerance. Exact convergence in this
/// sense is only guaranteed for deterministic MDPs with zero step reward.
pub const EXACT_EPS: f64 = 1e-12;

const SWEEP_CAP: usize = 500_000;

/// Dense per-state value table plus the number of sweeps that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    pub values: Vec<f64>,
    pub iteration: usize,
}

/// Option with a single initiation state and a single termination state,
/// carrying its precomputed multi-time model.
#[derive(Debug, Clone, PartialEq)]
pub struct PointOption {
    pub init: usize,
    pub term: usize,
    /// Expected discounted reward accumulated while the option runs.
    pub discounted_reward: f64,
    /// Expected discount at termination: `gamma^k` for a deterministic
    /// duration of `k` steps.
    pub term_discount: f64,
}

/// Outcome of a measured value-iteration run.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    pub value: ValueFunction,
    /// Smallest sweep count after which every state stays epsilon-optimal.
    pub iterations: usize,
    /// Per-state version of the same quantity (never below 1).
    pub per_state_iteration: Vec<usize>,
}

/// Tolerance used for the internal optimal-value solve backing an
/// epsilon-measured run.
pub fn vstar_tolerance(epsilon: f64) -> f64 {
    (epsilon / 10.0).min(1e-10)
}

/// Solve for the optimal value function by iterating the Bellman optimality
/// operator until the sup-norm residual falls below
/// `tolerance * (1 - gamma) / (2 * gamma)`.
///
/// `tolerance == 0` requests exact convergence (successive iterates
/// identical), which terminates for deterministic goal MDPs with zero step
/// reward.
pub fn solve_optimal(mdp: &Mdp, tolerance: f64) -> Result<ValueFunction> {
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::InvalidInput(format!(
            "tolerance must be nonnegative, got {tolerance}"
        )));
    }
    let gamma = mdp.gamma();
    let threshold = tolerance * (1.0 - gamma) / (2.0 * gamma);
    let n = mdp.n_states();
    let mut v = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for sweep in 1..=SWEEP_CAP {
        backup_sweep(mdp, &[], &v, &mut next);
        residual = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        let done = if threshold > 0.0 {
            residual < threshold
        } else {
            residual == 0.0
        };
        if done {
            return Ok(ValueFunction {
                values: v,
                iteration: sweep,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: SWEEP_CAP,
        residual,
    })
}

/// One synchronous sweep of the Bellman optimality operator over primitive
/// actions plus any options initiating at each state.
fn backup_sweep(mdp: &Mdp, options_by_init: &[Vec<(f64, f64, usize)>], v: &[f64], out: &mut [f64]) {
    let gamma = mdp.gamma();
    for (s, slot) in out.iter_mut().enumerate() {
        let mut best = f64::NEG_INFINITY;
        for a in 0..mdp.n_actions() {
            let mut q = mdp.reward(s, a);
            let mut expected = 0.0;
            for &(next, p) in mdp.transitions(s, a) {
                expected += p * v[next];
            }
            q += gamma * expected;
            if q > best {
                best = q;
            }
        }
        if let Some(opts) = options_by_init.get(s) {
            for &(reward, discount, term) in opts {
                let q = reward + discount * v[term];
                if q > best {
                    best = q;
                }
            }
        }
        *slot = best;
    }
}

/// Compute the multi-time model of the point option from `init` to `term`
/// whose internal policy is an optimal policy of the MDP (ties between
/// optimal actions broken by lowest action index).
pub fn point_option_model(
    mdp: &Mdp,
    vstar: &ValueFunction,
    init: usize,
    term: usize,
) -> Result<PointOption> {
    let n = mdp.n_states();
    if init >= n || term >= n {
        return Err(Error::InvalidInput(format!(
            "option ({init} -> {term}) out of range"
        )));
    }
    if init == term {
        return Err(Error::DegenerateOption(init));
    }
    let policy = greedy_policy(mdp, &vstar.values);

    // term must be reachable from init along the policy's support.
    let mut seen = vec![false; n];
    seen[init] = true;
    let mut stack = vec![init];
    let mut reachable = false;
    while let Some(s) = stack.pop() {
        if s == term {
            reachable = true;
            break;
        }
        for &(next, p) in mdp.transitions(s, policy[s]) {
            if p > 0.0 && !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    if !reachable {
        return Err(Error::OptionNeverTerminates { init, term });
    }

    // Policy evaluation with absorption at term: h is the discounted reward
    // collected before termination, w the expected discount at termination.
    let gamma = mdp.gamma();
    let mut h = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut h_next = vec![0.0; n];
    let mut w_next = vec![0.0; n];
    for sweep in 0..SWEEP_CAP {
        let mut change: f64 = 0.0;
        for s in 0..n {
            if s == term {
                h_next[s] = 0.0;
                w_next[s] = 1.0;
                continue;
            }
            let a = policy[s];
            let mut hv = mdp.reward(s, a);
            let mut wv = 0.0;
            for &(next, p) in mdp.transitions(s, a) {
                if next == term {
                    wv += p;
                } else {
                    hv += gamma * p * h[next];
                    wv += p * w[next];
                }
            }
            let wv = gamma * wv;
            h_next[s] = hv;
            w_next[s] = wv;
            change = change.max((hv - h[s]).abs()).max((wv - w[s]).abs());
        }
        std::mem::swap(&mut h, &mut h_next);
        std::mem::swap(&mut w, &mut w_next);
        if change == 0.0 || (sweep > 0 && change < 1e-15) {
            break;
        }
    }
    let term_discount = w[init];
    if term_discount <= 0.0 || term_discount.is_nan() {
        return Err(Error::OptionNeverTerminates { init, term });
    }
    Ok(PointOption {
        init,
        term,
        discounted_reward: h[init],
        term_discount,
    })
}

/// Greedy policy with respect to a value function; ties broken by lowest
/// action index.
pub fn greedy_policy(mdp: &Mdp, values: &[f64]) -> Vec<usize> {
    let gamma = mdp.gamma();
    (0..mdp.n_states())
        .map(|s| {
            let mut best_a = 0;
            let mut best_q = f64::NEG_INFINITY;
            for a in 0..mdp.n_actions() {
                let mut q = mdp.reward(s, a);
                for &(next, p) in mdp.transitions(s, a) {
                    q += gamma * p * values[next];
                }
                if q > best_q {
                    best_q = q;
                    best_a = a;
                }
            }
            best_a
        })
        .collect()
}

fn group_options(n: usize, options: &[PointOption]) -> Vec<Vec<(f64, f64, usize)>> {
    let mut by_init: Vec<Vec<(f64, f64, usize)>> = vec![Vec::new(); n];
    for o in options {
        by_init[o.init].push((o.discounted_reward, o.term_discount, o.term));
    }
    by_init
}

/// Run measured value iteration from `v0`, computing the optimal values
/// internally. Returns `L_{epsilon, v0}` and the per-state convergence
/// sweeps.
pub fn value_iteration(
    mdp: &Mdp,
    options: &[PointOption],
    epsilon: f64,
    v0: &[f64],
) -> Result<ConvergenceResult> {
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    value_iteration_with_vstar(mdp, options, epsilon, v0, &vstar)
}

/// Measured value iteration against a precomputed optimal value function.
/// Use this variant when evaluating many option sets on the same MDP.
pub fn value_iteration_with_vstar(
    mdp: &Mdp,
    options: &[PointOption],
    epsilon: f64,
    v0: &[f64],
    vstar: &ValueFunction,
) -> Result<ConvergenceResult> {
    let run = run_sweeps(mdp, options, epsilon, v0, None, &vstar.values)?;
    let per_state: Vec<usize> = run.stays.iter().map(|&b| b.max(1)).collect();
    let iterations = per_state.iter().copied().max().unwrap_or(1);
    Ok(ConvergenceResult {
        value: ValueFunction {
            values: run.values,
            iteration: run.sweeps,
        },
        iterations,
        per_state_iteration: per_state,
    })
}

/// Shorthand: `L_{epsilon, 0}(options)`.
pub fn measure_l(mdp: &Mdp, options: &[PointOption], epsilon: f64) -> Result<usize> {
    let v0 = vec![0.0; mdp.n_states()];
    Ok(value_iteration(mdp, options, epsilon, &v0)?.iterations)
}

/// Same as [`measure_l`] with a shared optimal value function.
pub fn measure_l_with_vstar(
    mdp: &Mdp,
    options: &[PointOption],
    epsilon: f64,
    vstar: &ValueFunction,
) -> Result<usize> {
    let v0 = vec![0.0; mdp.n_states()];
    Ok(value_iteration_with_vstar(mdp, options, epsilon, &v0, vstar)?.iterations)
}

pub(crate) struct SweepRun {
    /// Raw per-state stays-optimal sweep indices (0 when already optimal at
    /// the initial function).
    pub stays: Vec<usize>,
    pub values: Vec<f64>,
    pub sweeps: usize,
}

/// Iterate synchronous sweeps from `v0`, recording for each state the last
/// sweep at which its value was not epsilon-optimal. With `pin = Some(s)`,
/// state `s` is held at its optimal value at every sweep, including sweep
/// zero; its own backup is suppressed.
pub(crate) fn run_sweeps(
    mdp: &Mdp,
    options: &[PointOption],
    epsilon: f64,
    v0: &[f64],
    pin: Option<usize>,
    vstar: &[f64],
) -> Result<SweepRun> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidInput(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    let n = mdp.n_states();
    if v0.len() != n || vstar.len() != n {
        return Err(Error::InvalidInput("value function has wrong length".into()));
    }
    let by_init = group_options(n, options);
    let within = |err: f64| {
        if epsilon > 0.0 {
            err < epsilon
        } else {
            err <= EXACT_EPS
        }
    };
    // Sweep until the run is this close to the stored optimum, so that any
    // later iterate is decided. Zero requests exact agreement.
    let tail_tol = if epsilon > 0.0 {
        (epsilon / 10.0).min(1e-9).max(2.0 * vstar_tolerance(epsilon))
    } else {
        0.0
    };

    let mut v = v0.to_vec();
    if let Some(p) = pin {
        v[p] = vstar[p];
    }
    let mut last_bad: Vec<isize> = vec![-1; n];
    let record = |v: &[f64], sweep: usize, last_bad: &mut Vec<isize>| -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..n {
            let err = (v[s] - vstar[s]).abs();
            if !within(err) {
                last_bad[s] = sweep as isize;
            }
            worst = worst.max(err);
        }
        worst
    };
    record(&v, 0, &mut last_bad);

    let mut next = vec![0.0; n];
    let mut sweeps = 0;
    let mut worst = f64::INFINITY;
    for sweep in 1..=SWEEP_CAP {
        backup_sweep(mdp, &by_init, &v, &mut next);
        if let Some(p) = pin {
            next[p] = vstar[p];
        }
        let residual = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        worst = record(&v, sweep, &mut last_bad);
        sweeps = sweep;
        // A stationary iterate never changes again, so the run is decided.
        if worst <= tail_tol || residual == 0.0 {
            break;
        }
    }
    if !within(worst) {
        return Err(Error::NonConvergence {
            iterations: sweeps,
            residual: worst,
        });
    }
    Ok(SweepRun {
        stays: last_bad.iter().map(|&b| (b + 1) as usize).collect(),
        values: v,
        sweeps,
    })
}

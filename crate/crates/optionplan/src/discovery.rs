//! Option-set discovery: the two approximation algorithms, exact
//! enumeration oracles, the one-at-a-time greedy strategy, and the two
//! graph-heuristic baselines. Every produced option terminates at the goal
//! (a terminal state anywhere else can be swapped to the goal without
//! hurting convergence), and every result carries its measured iteration
//! count.

use std::collections::BTreeSet;

use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::combinatorial::k_center::{asym_k_center, KCenterInstance};
use crate::combinatorial::set_cover::{greedy_set_cover, next_combination, SetCoverInstance};
use crate::combinatorial::{betweenness_centrality, laplacian_eigens};
use crate::distance::{distance_matrix, DistanceMatrix};
use crate::error::{Error, Result};
use crate::exec;
use crate::mdp::Mdp;
use crate::planner::{
    measure_l_with_vstar, point_option_model, solve_optimal, vstar_tolerance, PointOption,
    ValueFunction,
};

/// Default cap on enumeration sizes for the exact oracles and Expand.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Option sets produced by enumeration this small are evaluated by running
/// value iteration directly; larger deterministic instances use the
/// distance-matrix form of the iteration count, which is exact for them.
const DIRECT_EVAL_MAX_STATES: usize = 32;

const ENUM_CHUNK: usize = 1 << 14;

/// Which procedure produced an option set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    AMomi,
    AMimo,
    Optimal,
    Greedy,
    Betweenness,
    Eigen,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::AMomi => "a-momi",
            Method::AMimo => "a-mimo",
            Method::Optimal => "optimal",
            Method::Greedy => "greedy",
            Method::Betweenness => "betweenness",
            Method::Eigen => "eigen",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A discovered option set with its measured iteration count.
#[derive(Debug, Clone, PartialEq)]
pub struct OptionSet {
    pub options: Vec<PointOption>,
    pub method: Method,
    /// Exact k-center objective over the chosen initiation states
    /// (a-mimo only).
    pub predicted_radius: Option<usize>,
    pub measured_l: usize,
    /// True when Expand hit its enumeration budget and fell back to adding
    /// options one at a time.
    pub expand_fallback: bool,
}

impl OptionSet {
    pub fn initiation_states(&self) -> Vec<usize> {
        self.options.iter().map(|o| o.init).collect()
    }
}

impl Serialize for OptionSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Endpoints<'a>(&'a [PointOption]);
        impl Serialize for Endpoints<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for o in self.0 {
                    #[derive(Serialize)]
                    struct Pair {
                        init: usize,
                        term: usize,
                    }
                    seq.serialize_element(&Pair {
                        init: o.init,
                        term: o.term,
                    })?;
                }
                seq.end()
            }
        }
        let extra = usize::from(self.expand_fallback);
        let mut st = serializer.serialize_struct("OptionSet", 4 + extra)?;
        st.serialize_field("method", self.method.tag())?;
        st.serialize_field("options", &Endpoints(&self.options))?;
        st.serialize_field("predicted_radius", &self.predicted_radius)?;
        st.serialize_field("measured_L", &self.measured_l)?;
        if self.expand_fallback {
            st.serialize_field("expand_fallback", &true)?;
        }
        st.end()
    }
}

/// Directed state-transition graph: an edge per positive-probability
/// primitive transition, self-loops removed.
pub fn transition_digraph(mdp: &Mdp) -> Vec<Vec<usize>> {
    let n = mdp.n_states();
    (0..n)
        .map(|s| {
            let mut nbrs: Vec<usize> = (0..mdp.n_actions())
                .flat_map(|a| mdp.transitions(s, a).iter().copied())
                .filter(|&(next, p)| p > 0.0 && next != s)
                .map(|(next, _)| next)
                .collect();
            nbrs.sort_unstable();
            nbrs.dedup();
            nbrs
        })
        .collect()
}

/// Symmetrized, unweighted version of the transition graph.
pub fn symmetrized_graph(mdp: &Mdp) -> Vec<Vec<usize>> {
    let digraph = transition_digraph(mdp);
    let n = digraph.len();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (u, nbrs) in digraph.iter().enumerate() {
        for &v in nbrs {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

fn goal_options(mdp: &Mdp, vstar: &ValueFunction, inits: &[usize]) -> Result<Vec<PointOption>> {
    inits
        .iter()
        .map(|&s| point_option_model(mdp, vstar, s, mdp.goal()))
        .collect()
}

fn non_goal_states(mdp: &Mdp) -> Vec<usize> {
    (0..mdp.n_states()).filter(|&s| s != mdp.goal()).collect()
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

fn ceil_log2(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// Minimize the option count subject to converging within `ell` sweeps.
///
/// Builds the convergence-distance matrix, forms one candidate subset per
/// state that does not already converge within `ell` (the states it would
/// pull within `ell` if it got an option to the goal), covers the slow
/// states greedily, and emits one goal-terminating option per chosen
/// center. A cover produced for a tighter bound is also valid for `ell`,
/// so the greedy step runs for every bound from `ell` downward and the
/// smallest cover wins; this keeps the option count non-increasing in
/// `ell` without weakening the guarantee `measured_l <= ell`.
pub fn a_momi(mdp: &Mdp, epsilon: f64, ell: usize) -> Result<OptionSet> {
    if ell == 0 {
        return Err(Error::InvalidInput("ell must be at least 1".into()));
    }
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    let dm = distance_matrix(mdp, epsilon)?;
    let mut best: Option<Vec<usize>> = None;
    for bound in (1..=ell).rev() {
        match greedy_momi_cover(mdp, &dm, bound) {
            Ok(inits) => {
                if best.as_ref().is_none_or(|b| inits.len() < b.len()) {
                    best = Some(inits);
                }
            }
            Err(e) if bound == ell => return Err(e),
            Err(_) => break,
        }
    }
    let inits = best.expect("the requested bound produced a cover");
    let options = goal_options(mdp, &vstar, &inits)?;
    let measured_l = measure_l_with_vstar(mdp, &options, epsilon, &vstar)?;
    Ok(OptionSet {
        options,
        method: Method::AMomi,
        predicted_radius: None,
        measured_l,
        expand_fallback: false,
    })
}

/// One round of the set-cover step at a fixed iteration bound: cover the
/// states slower than the bound by subsets of states each candidate center
/// would pull within it. Any non-goal state is a candidate center; a
/// center that already converges quickly can still pull several slow
/// states at once when their optimal paths merge through it, and covers
/// drawn from the full family match the option-count optimum exactly on
/// deterministic MDPs.
fn greedy_momi_cover(mdp: &Mdp, dm: &DistanceMatrix, ell: usize) -> Result<Vec<usize>> {
    let slow: Vec<usize> = (0..mdp.n_states())
        .filter(|&s| dm.no_option[s] > ell)
        .collect();
    if slow.is_empty() {
        return Ok(Vec::new());
    }
    let candidates = non_goal_states(mdp);
    let universe: BTreeSet<usize> = slow.iter().copied().collect();
    let subsets: Vec<BTreeSet<usize>> = candidates
        .iter()
        .map(|&center| {
            slow.iter()
                .copied()
                .filter(|&s| dm.d[s][center] < ell)
                .collect()
        })
        .collect();
    let inst = SetCoverInstance::new(universe, subsets)?;
    let chosen = greedy_set_cover(&inst).map_err(|e| match e {
        Error::UncoveredElement(state) => Error::InfeasibleEll { state, ell },
        other => other,
    })?;
    let mut inits: Vec<usize> = chosen.into_iter().map(|i| candidates[i]).collect();
    inits.sort_unstable();
    Ok(inits)
}

/// Minimize the iteration count subject to using at most `k` options.
///
/// Solves the asymmetric k-center problem over the convergence distances
/// of the non-goal states. When the k-center procedure uses fewer than `k`
/// centers, Expand fills the remainder: it repeatedly enumerates candidate
/// subsets of size `min(ceil(log2 k), k - |O|)` and adds the one whose
/// measured iteration count is smallest (ties lexicographic). If a round's
/// enumeration would exceed `budget`, it falls back to adding one option at
/// a time and flags the result.
pub fn a_mimo(mdp: &Mdp, epsilon: f64, k: usize, budget: u64) -> Result<OptionSet> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    let dm = distance_matrix(mdp, epsilon)?;
    let universe = non_goal_states(mdp);
    let target = k.min(universe.len());
    let dist: Vec<Vec<usize>> = universe
        .iter()
        .map(|&s| universe.iter().map(|&t| dm.d[s][t]).collect())
        .collect();
    let mut chosen: BTreeSet<usize> = if universe.is_empty() {
        BTreeSet::new()
    } else {
        let inst = KCenterInstance::new(universe.clone(), dist, target.max(1))?;
        let (centers, _) = asym_k_center(&inst)?;
        centers.into_iter().collect()
    };
    let mut expand_fallback = false;
    while chosen.len() < target {
        let remaining = target - chosen.len();
        let mut r = ceil_log2(k).max(1).min(remaining);
        let candidates: Vec<usize> = universe
            .iter()
            .copied()
            .filter(|s| !chosen.contains(s))
            .collect();
        if binomial(candidates.len(), r) > budget as u128 {
            r = 1;
            expand_fallback = true;
        }
        let base: Vec<usize> = chosen.iter().copied().collect();
        let mut best: Option<(usize, Vec<usize>)> = None;
        let mut combo: Vec<usize> = (0..r).collect();
        loop {
            let mut inits = base.clone();
            inits.extend(combo.iter().map(|&i| candidates[i]));
            inits.sort_unstable();
            let options = goal_options(mdp, &vstar, &inits)?;
            let l = measure_l_with_vstar(mdp, &options, epsilon, &vstar)?;
            if best.as_ref().is_none_or(|(bl, _)| l < *bl) {
                best = Some((l, combo.iter().map(|&i| candidates[i]).collect()));
            }
            if !next_combination(&mut combo, candidates.len()) {
                break;
            }
        }
        let (_, addition) = best.expect("at least one candidate subset");
        chosen.extend(addition);
    }
    let inits: Vec<usize> = chosen.into_iter().collect();
    let predicted_radius = dm.coverage_radius(&universe, &inits);
    let options = goal_options(mdp, &vstar, &inits)?;
    let measured_l = measure_l_with_vstar(mdp, &options, epsilon, &vstar)?;
    Ok(OptionSet {
        options,
        method: Method::AMimo,
        predicted_radius: Some(predicted_radius),
        measured_l,
        expand_fallback,
    })
}

/// How candidate option sets are scored during enumeration.
enum Evaluator<'a> {
    /// Run measured value iteration for every candidate.
    Direct {
        mdp: &'a Mdp,
        epsilon: f64,
        vstar: &'a ValueFunction,
    },
    /// Deterministic MDPs: the iteration count equals
    /// `max_s min(no_option(s), 1 + min_c d(s, c))`, computable straight
    /// from the distance matrix.
    Formula { dm: &'a DistanceMatrix, goal: usize },
}

impl Evaluator<'_> {
    fn eval(&self, inits: &[usize]) -> Result<usize> {
        match self {
            Evaluator::Direct { mdp, epsilon, vstar } => {
                let options = goal_options(mdp, vstar, inits)?;
                measure_l_with_vstar(mdp, &options, *epsilon, vstar)
            }
            Evaluator::Formula { dm, goal } => {
                let mut worst = 1;
                for s in 0..dm.n() {
                    if s == *goal {
                        continue;
                    }
                    let pulled = inits
                        .iter()
                        .map(|&c| dm.d[s][c] + 1)
                        .min()
                        .unwrap_or(usize::MAX);
                    worst = worst.max(dm.no_option[s].min(pulled));
                }
                Ok(worst)
            }
        }
    }
}

struct EnumContext<'a> {
    candidates: Vec<usize>,
    evaluator: Evaluator<'a>,
}

fn enum_context<'a>(
    mdp: &'a Mdp,
    epsilon: f64,
    vstar: &'a ValueFunction,
    dm: &'a Option<DistanceMatrix>,
) -> EnumContext<'a> {
    let evaluator = match dm {
        Some(dm) => Evaluator::Formula {
            dm,
            goal: mdp.goal(),
        },
        None => Evaluator::Direct { mdp, epsilon, vstar },
    };
    EnumContext {
        candidates: non_goal_states(mdp),
        evaluator,
    }
}

fn needs_formula(mdp: &Mdp) -> bool {
    mdp.is_deterministic() && mdp.n_states() > DIRECT_EVAL_MAX_STATES
}

/// Evaluate every size-`size` subset of the candidates, returning
/// `(score, inits)` minimized by score with lexicographic tie-break, plus
/// optionally stopping early once a score passes `good_enough`.
fn scan_size(
    ctx: &EnumContext,
    size: usize,
    good_enough: Option<usize>,
) -> Result<Option<(usize, Vec<usize>)>> {
    let m = ctx.candidates.len();
    if size > m {
        return Ok(None);
    }
    if size == 0 {
        let score = ctx.evaluator.eval(&[])?;
        return Ok(Some((score, Vec::new())));
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut combo: Vec<usize> = (0..size).collect();
    let mut exhausted = false;
    while !exhausted {
        let mut chunk: Vec<Vec<usize>> = Vec::with_capacity(ENUM_CHUNK);
        loop {
            chunk.push(combo.iter().map(|&i| ctx.candidates[i]).collect());
            if !next_combination(&mut combo, m) {
                exhausted = true;
                break;
            }
            if chunk.len() == ENUM_CHUNK {
                break;
            }
        }
        let scores: Vec<Result<usize>> =
            exec::map_slice(&chunk, |inits| ctx.evaluator.eval(inits));
        for (inits, score) in chunk.into_iter().zip(scores) {
            let score = score?;
            if best.as_ref().is_none_or(|(b, _)| score < *b) {
                best = Some((score, inits));
            }
            if let Some(threshold) = good_enough {
                if best.as_ref().is_some_and(|(b, _)| *b <= threshold) {
                    return Ok(best);
                }
            }
        }
    }
    Ok(best)
}

/// Exact MIMO by enumeration over goal-terminating option sets of size at
/// most `k`. Smallest optimal set, lexicographically first, wins.
pub fn optimal_mimo(mdp: &Mdp, epsilon: f64, k: usize, budget: u64) -> Result<OptionSet> {
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    let n_candidates = non_goal_states(mdp).len();
    let kk = k.min(n_candidates);
    let required: u128 = (0..=kk).map(|j| binomial(n_candidates, j)).sum();
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let dm = if needs_formula(mdp) {
        Some(distance_matrix(mdp, epsilon)?)
    } else {
        None
    };
    let ctx = enum_context(mdp, epsilon, &vstar, &dm);
    let mut best: Option<(usize, Vec<usize>)> = None;
    for size in 0..=kk {
        if let Some((score, inits)) = scan_size(&ctx, size, None)? {
            if best.as_ref().is_none_or(|(b, _)| score < *b) {
                best = Some((score, inits));
            }
        }
        if best.as_ref().is_some_and(|(b, _)| *b <= 1) {
            break;
        }
    }
    let (_, inits) = best.expect("size-0 scan always yields a result");
    let options = goal_options(mdp, &vstar, &inits)?;
    let measured_l = measure_l_with_vstar(mdp, &options, epsilon, &vstar)?;
    Ok(OptionSet {
        options,
        method: Method::Optimal,
        predicted_radius: None,
        measured_l,
        expand_fallback: false,
    })
}

/// Exact MOMI by enumeration: the smallest goal-terminating option set
/// whose measured iteration count is at most `ell`.
pub fn optimal_momi(mdp: &Mdp, epsilon: f64, ell: usize, budget: u64) -> Result<OptionSet> {
    if ell == 0 {
        return Err(Error::InvalidInput("ell must be at least 1".into()));
    }
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    let n_candidates = non_goal_states(mdp).len();
    let dm = if needs_formula(mdp) {
        Some(distance_matrix(mdp, epsilon)?)
    } else {
        None
    };
    let ctx = enum_context(mdp, epsilon, &vstar, &dm);
    let mut spent: u128 = 0;
    for size in 0..=n_candidates {
        spent += binomial(n_candidates, size);
        if spent > budget as u128 {
            return Err(Error::BudgetExceeded {
                required: spent,
                budget,
            });
        }
        if let Some((score, inits)) = scan_size(&ctx, size, Some(ell))? {
            if score <= ell {
                let options = goal_options(mdp, &vstar, &inits)?;
                let measured_l = measure_l_with_vstar(mdp, &options, epsilon, &vstar)?;
                return Ok(OptionSet {
                    options,
                    method: Method::Optimal,
                    predicted_radius: None,
                    measured_l,
                    expand_fallback: false,
                });
            }
        }
    }
    Err(Error::InfeasibleEll {
        state: mdp.goal(),
        ell,
    })
}

/// Baseline that adds one option at a time, each minimizing the resulting
/// measured iteration count (ties lexicographic).
pub fn greedy_mimo(mdp: &Mdp, epsilon: f64, k: usize) -> Result<OptionSet> {
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    let mut chosen: Vec<usize> = Vec::new();
    let target = k.min(non_goal_states(mdp).len());
    while chosen.len() < target {
        let mut best: Option<(usize, usize)> = None;
        for s in non_goal_states(mdp) {
            if chosen.contains(&s) {
                continue;
            }
            let mut inits = chosen.clone();
            inits.push(s);
            inits.sort_unstable();
            let options = goal_options(mdp, &vstar, &inits)?;
            let l = measure_l_with_vstar(mdp, &options, epsilon, &vstar)?;
            if best.is_none_or(|(bl, _)| l < bl) {
                best = Some((l, s));
            }
        }
        let (_, pick) = best.expect("candidates remain");
        chosen.push(pick);
        chosen.sort_unstable();
    }
    let options = goal_options(mdp, &vstar, &chosen)?;
    let measured_l = measure_l_with_vstar(mdp, &options, epsilon, &vstar)?;
    Ok(OptionSet {
        options,
        method: Method::Greedy,
        predicted_radius: None,
        measured_l,
        expand_fallback: false,
    })
}

/// Baseline: options from the `k` states of highest shortest-path
/// betweenness in the state-transition graph, terminating at the goal.
pub fn betweenness_options(mdp: &Mdp, epsilon: f64, k: usize) -> Result<OptionSet> {
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    let scores = betweenness_centrality(&transition_digraph(mdp));
    let mut ranked = non_goal_states(mdp);
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut inits: Vec<usize> = ranked.into_iter().take(k).collect();
    inits.sort_unstable();
    let options = goal_options(mdp, &vstar, &inits)?;
    let measured_l = measure_l_with_vstar(mdp, &options, epsilon, &vstar)?;
    Ok(OptionSet {
        options,
        method: Method::Betweenness,
        predicted_radius: None,
        measured_l,
        expand_fallback: false,
    })
}

/// Baseline: subgoals at the extrema of the low-order Laplacian
/// eigenvectors of the symmetrized transition graph, as options to the
/// goal. The subgoal of an eigenvector is its largest-magnitude component
/// over non-goal states (ties lexicographic); duplicate subgoals collapse.
pub fn eigenoptions(mdp: &Mdp, epsilon: f64, k: usize) -> Result<OptionSet> {
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    let mut inits: BTreeSet<usize> = BTreeSet::new();
    if k > 0 {
        let adj = symmetrized_graph(mdp);
        let pairs = laplacian_eigens(&adj, k)?;
        for (_, v) in &pairs {
            let subgoal = non_goal_states(mdp)
                .into_iter()
                .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
                .expect("at least one non-goal state");
            inits.insert(subgoal);
        }
    }
    let inits: Vec<usize> = inits.into_iter().collect();
    let options = goal_options(mdp, &vstar, &inits)?;
    let measured_l = measure_l_with_vstar(mdp, &options, epsilon, &vstar)?;
    Ok(OptionSet {
        options,
        method: Method::Eigen,
        predicted_radius: None,
        measured_l,
        expand_fallback: false,
    })
}

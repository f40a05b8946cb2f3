//! Tabular MDP representation with one absorbing goal state.
//!
//! The planner assumes a goal-based structure: exactly one absorbing state
//! with zero reward, reachable from every state. `validate` checks those
//! assumptions; constructors in [`grid`], [`reduction`], and [`domains`]
//! produce MDPs that satisfy them.

pub mod domains;
pub mod grid;
pub mod json;
pub mod reduction;

use crate::error::{Error, Result};

/// Probability mass per (state, action) must sum to one within this slack.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// Finite tabular MDP: states `0..n_states`, actions `0..n_actions`,
/// a discount in `(0, 1)`, and a designated absorbing goal state.
///
/// Immutable after construction; safe to share across parallel workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Mdp {
    n_states: usize,
    n_actions: usize,
    /// transitions[s][a] -> list of (next_state, probability)
    transitions: Vec<Vec<Vec<(usize, f64)>>>,
    /// rewards[s][a]
    rewards: Vec<Vec<f64>>,
    gamma: f64,
    goal: usize,
}

impl Mdp {
    /// Build an MDP from raw tables.
    ///
    /// Rejects structural problems (ragged tables, out-of-range indices,
    /// discount outside `(0, 1)`). Semantic assumptions such as probability
    /// sums and goal absorption are reported by [`Mdp::validate`] instead,
    /// so that violating instances can still be constructed and inspected.
    pub fn new(
        transitions: Vec<Vec<Vec<(usize, f64)>>>,
        rewards: Vec<Vec<f64>>,
        gamma: f64,
        goal: usize,
    ) -> Result<Self> {
        let n_states = transitions.len();
        if n_states == 0 {
            return Err(Error::InvalidMdp("MDP must have at least one state".into()));
        }
        let n_actions = transitions[0].len();
        if n_actions == 0 {
            return Err(Error::InvalidMdp("MDP must have at least one action".into()));
        }
        if !(0.0 < gamma && gamma < 1.0) {
            return Err(Error::InvalidMdp(format!(
                "gamma must lie in (0, 1), got {gamma}"
            )));
        }
        if goal >= n_states {
            return Err(Error::InvalidMdp(format!(
                "goal index {goal} out of range for {n_states} states"
            )));
        }
        if rewards.len() != n_states {
            return Err(Error::InvalidMdp("reward table has wrong state count".into()));
        }
        for s in 0..n_states {
            if transitions[s].len() != n_actions || rewards[s].len() != n_actions {
                return Err(Error::InvalidMdp(format!(
                    "state {s} does not have {n_actions} actions"
                )));
            }
            for (a, action) in transitions[s].iter().enumerate() {
                for &(next, p) in action {
                    if next >= n_states {
                        return Err(Error::InvalidMdp(format!(
                            "transition ({s}, {a}) targets out-of-range state {next}"
                        )));
                    }
                    if !p.is_finite() || p < 0.0 {
                        return Err(Error::InvalidMdp(format!(
                            "transition ({s}, {a}, {next}) has invalid probability {p}"
                        )));
                    }
                }
            }
        }
        Ok(Mdp {
            n_states,
            n_actions,
            transitions,
            rewards,
            gamma,
            goal,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn goal(&self) -> usize {
        self.goal
    }

    pub fn transitions(&self, state: usize, action: usize) -> &[(usize, f64)] {
        &self.transitions[state][action]
    }

    pub fn reward(&self, state: usize, action: usize) -> f64 {
        self.rewards[state][action]
    }

    /// True when every (state, action) pair has a single successor.
    pub fn is_deterministic(&self) -> bool {
        self.transitions
            .iter()
            .all(|acts| acts.iter().all(|t| t.len() == 1))
    }

    /// Check the goal-based structural assumptions.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                let sum: f64 = self.transitions[s][a].iter().map(|&(_, p)| p).sum();
                if (sum - 1.0).abs() > PROB_TOLERANCE {
                    violations.push((
                        "prob-sum".to_string(),
                        format!("probabilities for ({s}, {a}) sum to {sum}"),
                    ));
                }
                let r = self.rewards[s][a];
                if !r.is_finite() || r < 0.0 {
                    violations.push((
                        "reward-range".to_string(),
                        format!("reward for ({s}, {a}) is {r}, outside [0, RMax]"),
                    ));
                }
            }
        }
        let g = self.goal;
        for a in 0..self.n_actions {
            let absorbing = self.transitions[g][a].len() == 1
                && self.transitions[g][a][0].0 == g
                && (self.transitions[g][a][0].1 - 1.0).abs() <= PROB_TOLERANCE;
            if !absorbing {
                violations.push((
                    "goal-absorbing".to_string(),
                    format!("goal action {a} does not self-loop with probability 1"),
                ));
            }
            if self.rewards[g][a] != 0.0 {
                violations.push((
                    "goal-reward".to_string(),
                    format!("goal action {a} has nonzero reward {}", self.rewards[g][a]),
                ));
            }
        }
        for s in self.unreachable_states() {
            violations.push((
                "unreachable".to_string(),
                format!("state {s} cannot reach the goal under any policy"),
            ));
        }
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    /// Validate and turn any violation into an error.
    pub fn validated(self) -> Result<Self> {
        let report = self.validate();
        if report.ok {
            Ok(self)
        } else {
            let (rule, msg) = &report.violations[0];
            Err(Error::ValidationFailed(format!("{rule}: {msg}")))
        }
    }

    /// States with no positive-probability path to the goal.
    fn unreachable_states(&self) -> Vec<usize> {
        let mut reached = vec![false; self.n_states];
        reached[self.goal] = true;
        // Reverse adjacency over positive-probability transitions.
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); self.n_states];
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                for &(next, p) in &self.transitions[s][a] {
                    if p > 0.0 && next != s {
                        rev[next].push(s);
                    }
                }
            }
        }
        let mut stack = vec![self.goal];
        while let Some(v) = stack.pop() {
            for &u in &rev[v] {
                if !reached[u] {
                    reached[u] = true;
                    stack.push(u);
                }
            }
        }
        (0..self.n_states).filter(|&s| !reached[s]).collect()
    }
}

/// Outcome of [`Mdp::validate`]: `ok` iff `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    /// (rule id, message) pairs, one per violation.
    pub violations: Vec<(String, String)>,
}

/// Convert a multi-goal problem into a single-goal one by appending a fresh
/// absorbing state and redirecting every original goal to it with a single
/// zero-reward transition.
pub fn normalize_multi_goal(mdp: &Mdp, goals: &[usize]) -> Result<Mdp> {
    if goals.is_empty() {
        return Err(Error::EmptyGoalSet);
    }
    for &g in goals {
        if g >= mdp.n_states() {
            return Err(Error::InvalidMdp(format!("goal state {g} out of range")));
        }
    }
    let n = mdp.n_states();
    let new_goal = n;
    let n_actions = mdp.n_actions();
    let mut transitions = Vec::with_capacity(n + 1);
    let mut rewards = Vec::with_capacity(n + 1);
    for s in 0..n {
        if goals.contains(&s) {
            transitions.push(vec![vec![(new_goal, 1.0)]; n_actions]);
            rewards.push(vec![0.0; n_actions]);
        } else {
            transitions.push((0..n_actions).map(|a| mdp.transitions(s, a).to_vec()).collect());
            rewards.push((0..n_actions).map(|a| mdp.reward(s, a)).collect());
        }
    }
    transitions.push(vec![vec![(new_goal, 1.0)]; n_actions]);
    rewards.push(vec![0.0; n_actions]);
    Mdp::new(transitions, rewards, mdp.gamma(), new_goal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::domains::builtin;

    #[test]
    fn four_room_validates() {
        let dom = builtin("fourroom", None).unwrap();
        let report = dom.mdp.validate();
        assert!(report.ok, "violations: {:?}", report.violations);
    }

    #[test]
    fn goal_reward_violation_detected() {
        let dom = builtin("fig3", None).unwrap();
        let n = dom.mdp.n_states();
        let g = dom.mdp.goal();
        let mut transitions = Vec::new();
        let mut rewards = Vec::new();
        for s in 0..n {
            transitions.push(vec![dom.mdp.transitions(s, 0).to_vec()]);
            rewards.push(vec![dom.mdp.reward(s, 0)]);
        }
        rewards[g][0] = 1.0;
        let bad = Mdp::new(transitions, rewards, dom.mdp.gamma(), g).unwrap();
        let report = bad.validate();
        assert!(!report.ok);
        assert!(report.violations.iter().any(|(rule, _)| rule == "goal-reward"));
    }

    #[test]
    fn unreachable_state_detected() {
        // Two states: 0 self-loops forever, 1 is the goal.
        let transitions = vec![vec![vec![(0, 1.0)]], vec![vec![(1, 1.0)]]];
        let rewards = vec![vec![0.0], vec![0.0]];
        let mdp = Mdp::new(transitions, rewards, 0.9, 1).unwrap();
        let report = mdp.validate();
        assert!(!report.ok);
        assert!(report.violations.iter().any(|(rule, _)| rule == "unreachable"));
    }

    #[test]
    fn normalize_rejects_empty_goal_set() {
        let dom = builtin("fig3", None).unwrap();
        assert!(matches!(
            normalize_multi_goal(&dom.mdp, &[]),
            Err(Error::EmptyGoalSet)
        ));
    }

    #[test]
    fn normalize_adds_one_state() {
        let dom = builtin("grid9", None).unwrap();
        let n = dom.mdp.n_states();
        let out = normalize_multi_goal(&dom.mdp, &[dom.mdp.goal()]).unwrap();
        assert_eq!(out.n_states(), n + 1);
        assert_eq!(out.goal(), n);
        assert!(out.validate().ok);
    }
}

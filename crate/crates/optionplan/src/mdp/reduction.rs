//! Shortest-path MDP encoding of a set-cover instance.
//!
//! Each element becomes a state with one action per subset containing it;
//! each subset `X_i` becomes a two-state chain `X_i -> X'_i -> g`. The only
//! reward is on the final edge into the absorbing goal, so the optimal
//! policy follows the edges and every subset chain converges within two
//! sweeps. Whether all element states converge within two sweeps after
//! adding at most `k` goal-terminating point options is then exactly the
//! set-cover decision problem.

use crate::combinatorial::set_cover::SetCoverInstance;
use crate::error::{Error, Result};
use crate::mdp::Mdp;

/// Build the reduction MDP for a set-cover instance.
///
/// Returns the MDP plus display names (`u<element>`, `X<i>`, `X<i>'`, `g`).
/// State order: elements ascending, then subsets, then subset copies, then
/// the goal.
pub fn from_set_cover(inst: &SetCoverInstance) -> Result<(Mdp, Vec<String>)> {
    let elements: Vec<usize> = inst.universe.iter().copied().collect();
    let m = inst.subsets.len();
    for &u in &elements {
        if !inst.subsets.iter().any(|x| x.contains(&u)) {
            return Err(Error::UncoveredElement(u));
        }
    }
    let n_u = elements.len();
    let n = n_u + 2 * m + 1;
    let goal = n - 1;
    let x_state = |i: usize| n_u + i;
    let x_prime_state = |i: usize| n_u + m + i;

    let max_degree = elements
        .iter()
        .map(|u| inst.subsets.iter().filter(|x| x.contains(u)).count())
        .max()
        .unwrap_or(1)
        .max(1);

    let mut transitions = vec![Vec::new(); n];
    let mut rewards = vec![Vec::new(); n];
    for (pos, &u) in elements.iter().enumerate() {
        let targets: Vec<usize> = inst
            .subsets
            .iter()
            .enumerate()
            .filter(|(_, x)| x.contains(&u))
            .map(|(i, _)| x_state(i))
            .collect();
        for a in 0..max_degree {
            // Surplus actions self-loop so the action count is uniform.
            let target = targets.get(a).copied().unwrap_or(pos);
            transitions[pos].push(vec![(target, 1.0)]);
            rewards[pos].push(0.0);
        }
    }
    for i in 0..m {
        for a in 0..max_degree {
            let (xt, xr) = if a == 0 { (x_prime_state(i), 0.0) } else { (x_state(i), 0.0) };
            transitions[x_state(i)].push(vec![(xt, 1.0)]);
            rewards[x_state(i)].push(xr);
            let (pt, pr) = if a == 0 { (goal, 1.0) } else { (x_prime_state(i), 0.0) };
            transitions[x_prime_state(i)].push(vec![(pt, 1.0)]);
            rewards[x_prime_state(i)].push(pr);
        }
    }
    transitions[goal] = vec![vec![(goal, 1.0)]; max_degree];
    rewards[goal] = vec![0.0; max_degree];

    let mut names: Vec<String> = elements.iter().map(|u| format!("u{u}")).collect();
    names.extend((0..m).map(|i| format!("X{}", i + 1)));
    names.extend((0..m).map(|i| format!("X{}'", i + 1)));
    names.push("g".to_string());

    let mdp = Mdp::new(transitions, rewards, 0.95, goal)?.validated()?;
    Ok((mdp, names))
}

//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code)] // each suite uses its own subset of the generators

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use optionplan::combinatorial::set_cover::SetCoverInstance;
use optionplan::mdp::Mdp;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic single-action MDP whose transition graph is a tree rooted
/// at the goal (the last state). Every state's unique path leads to the
/// goal; reward 1 on the edge entering it.
pub fn random_tree_mdp(rng: &mut ChaCha8Rng, max_states: usize) -> Mdp {
    let n = rng.gen_range(2..=max_states);
    let goal = n - 1;
    let mut transitions = Vec::with_capacity(n);
    let mut rewards = Vec::with_capacity(n);
    for s in 0..n {
        if s == goal {
            transitions.push(vec![vec![(goal, 1.0)]]);
            rewards.push(vec![0.0]);
        } else {
            let next = rng.gen_range(s + 1..=goal);
            transitions.push(vec![vec![(next, 1.0)]]);
            rewards.push(vec![if next == goal { 1.0 } else { 0.0 }]);
        }
    }
    let gamma = if rng.gen_bool(0.5) { 0.9 } else { 0.95 };
    Mdp::new(transitions, rewards, gamma, goal).unwrap()
}

/// Deterministic two-action DAG MDP flowing to the goal (the last state).
pub fn random_dag_mdp(rng: &mut ChaCha8Rng, max_states: usize) -> Mdp {
    let n = rng.gen_range(3..=max_states);
    let goal = n - 1;
    let mut transitions = Vec::with_capacity(n);
    let mut rewards = Vec::with_capacity(n);
    for s in 0..n {
        if s == goal {
            transitions.push(vec![vec![(goal, 1.0)]; 2]);
            rewards.push(vec![0.0; 2]);
        } else {
            let a0 = rng.gen_range(s + 1..=goal);
            let a1 = rng.gen_range(s + 1..=goal);
            transitions.push(vec![vec![(a0, 1.0)], vec![(a1, 1.0)]]);
            rewards.push(vec![
                if a0 == goal { 1.0 } else { 0.0 },
                if a1 == goal { 1.0 } else { 0.0 },
            ]);
        }
    }
    let gamma = if rng.gen_bool(0.5) { 0.9 } else { 0.95 };
    Mdp::new(transitions, rewards, gamma, goal).unwrap()
}

/// Random set-cover instance in which every element is covered.
pub fn random_set_cover(
    rng: &mut ChaCha8Rng,
    max_elements: usize,
    max_subsets: usize,
) -> SetCoverInstance {
    let n = rng.gen_range(1..=max_elements);
    let m = rng.gen_range(1..=max_subsets);
    let universe: BTreeSet<usize> = (1..=n).collect();
    let mut subsets: Vec<BTreeSet<usize>> = (0..m)
        .map(|_| {
            universe
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.45))
                .collect()
        })
        .collect();
    // Drop uncovered elements into random subsets.
    for e in 1..=n {
        if !subsets.iter().any(|x| x.contains(&e)) {
            let i = rng.gen_range(0..m);
            subsets[i].insert(e);
        }
    }
    SetCoverInstance::new(universe, subsets).unwrap()
}

/// Random digraph adjacency on up to `max_nodes` nodes.
pub fn random_digraph(rng: &mut ChaCha8Rng, max_nodes: usize) -> Vec<Vec<usize>> {
    let n = rng.gen_range(2..=max_nodes);
    (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && rng.gen_bool(0.3))
                .collect()
        })
        .collect()
}

/// Unique goal-bound path of a state in a single-action tree MDP, as the
/// list of states visited after leaving `s`.
pub fn tree_path(mdp: &Mdp, s: usize) -> Vec<usize> {
    let mut path = Vec::new();
    let mut cur = s;
    while cur != mdp.goal() {
        cur = mdp.transitions(cur, 0)[0].0;
        path.push(cur);
    }
    path
}

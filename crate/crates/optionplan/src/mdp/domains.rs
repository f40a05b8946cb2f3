//! Built-in benchmark domains.
//!
//! `fig3`, `fig6`, and `fig7` are small hand-built MDPs used throughout the
//! test suite; `fourroom` is the classic 11x11 four-room grid shipped as a
//! map file; `grid9` is a 9x9 open grid; `goal-only` is the degenerate
//! single-state problem.

use crate::error::{Error, Result};
use crate::mdp::grid::{build_grid_mdp, parse_map, GridLayout, GridSpec};
use crate::mdp::Mdp;

/// The canonical four-room map bundled with the crate.
pub const FOUR_ROOM_MAP: &str = include_str!("../../data/four_room.map");

/// A named MDP plus display metadata.
#[derive(Debug, Clone)]
pub struct DomainInstance {
    pub name: String,
    pub mdp: Mdp,
    pub state_names: Vec<String>,
    /// Present for grid-based domains; enables ASCII rendering.
    pub layout: Option<GridLayout>,
}

/// Names accepted by [`builtin`].
pub const BUILTIN_DOMAINS: [&str; 6] = ["fig3", "fig6", "fig7", "fourroom", "grid9", "goal-only"];

/// Look up a built-in domain, optionally overriding its discount factor.
pub fn builtin(name: &str, gamma: Option<f64>) -> Result<DomainInstance> {
    match name {
        "fig3" => fig3(gamma.unwrap_or(0.9)),
        "fig6" => fig6(gamma.unwrap_or(0.95)),
        "fig7" => fig7(gamma.unwrap_or(0.95)),
        "fourroom" => build_four_room(gamma),
        "grid9" => grid9(gamma),
        "goal-only" | "goalonly" => goal_only(gamma.unwrap_or(0.95)),
        other => Err(Error::UnknownDomain(other.to_string())),
    }
}

fn chain_mdp(edges: &[(usize, usize)], n: usize, goal: usize, gamma: f64) -> Result<Mdp> {
    let mut transitions = vec![Vec::new(); n];
    let mut rewards = vec![Vec::new(); n];
    for s in 0..n {
        if s == goal {
            transitions[s].push(vec![(goal, 1.0)]);
            rewards[s].push(0.0);
            continue;
        }
        let (_, next) = edges
            .iter()
            .find(|&&(from, _)| from == s)
            .copied()
            .expect("every non-goal state has an outgoing edge");
        transitions[s].push(vec![(next, 1.0)]);
        rewards[s].push(if next == goal { 1.0 } else { 0.0 });
    }
    Mdp::new(transitions, rewards, gamma, goal)?.validated()
}

/// Six-state funnel: two two-state branches merging into a two-state tail.
fn fig3(gamma: f64) -> Result<DomainInstance> {
    // s1..s6 are states 0..5, g is 6.
    let edges = [(0, 1), (1, 4), (2, 3), (3, 4), (4, 5), (5, 6)];
    let mdp = chain_mdp(&edges, 7, 6, gamma)?;
    let mut names: Vec<String> = (1..=6).map(|i| format!("s{i}")).collect();
    names.push("g".into());
    Ok(DomainInstance {
        name: "fig3".into(),
        mdp,
        state_names: names,
        layout: None,
    })
}

/// Stochastic diamond: a coin-flip state above two branches that rejoin
/// before the goal.
fn fig6(gamma: f64) -> Result<DomainInstance> {
    // s0..s3 are states 0..3, g is 4.
    let n = 5;
    let goal = 4;
    let mut transitions = vec![Vec::new(); n];
    let mut rewards = vec![Vec::new(); n];
    transitions[0].push(vec![(1, 0.5), (2, 0.5)]);
    rewards[0].push(0.0);
    transitions[1].push(vec![(3, 1.0)]);
    rewards[1].push(0.0);
    transitions[2].push(vec![(3, 1.0)]);
    rewards[2].push(0.0);
    transitions[3].push(vec![(goal, 1.0)]);
    rewards[3].push(1.0);
    transitions[goal].push(vec![(goal, 1.0)]);
    rewards[goal].push(0.0);
    let mdp = Mdp::new(transitions, rewards, gamma, goal)?.validated()?;
    let mut names: Vec<String> = (0..4).map(|i| format!("s{i}")).collect();
    names.push("g".into());
    Ok(DomainInstance {
        name: "fig6".into(),
        mdp,
        state_names: names,
        layout: None,
    })
}

/// Two mirrored arms around a central goal; each arm is a three-state chain
/// fed by three leaves. The instance where one-at-a-time greedy option
/// selection makes no progress while the optimal pair halves the iteration
/// count.
fn fig7(gamma: f64) -> Result<DomainInstance> {
    // x1..x6 are 0..5, y1..y6 are 6..11, g is 12.
    let edges = [
        (0, 12),
        (1, 0),
        (2, 1),
        (3, 2),
        (4, 2),
        (5, 2),
        (6, 12),
        (7, 6),
        (8, 7),
        (9, 8),
        (10, 8),
        (11, 8),
    ];
    let mdp = chain_mdp(&edges, 13, 12, gamma)?;
    let mut names: Vec<String> = (1..=6).map(|i| format!("x{i}")).collect();
    names.extend((1..=6).map(|i| format!("y{i}")));
    names.push("g".into());
    Ok(DomainInstance {
        name: "fig7".into(),
        mdp,
        state_names: names,
        layout: None,
    })
}

/// Build the bundled 11x11 four-room domain.
pub fn build_four_room(gamma: Option<f64>) -> Result<DomainInstance> {
    let spec = parse_map(FOUR_ROOM_MAP)?;
    grid_domain("fourroom", spec, gamma)
}

fn grid9(gamma: Option<f64>) -> Result<DomainInstance> {
    grid_domain("grid9", GridSpec::open(9, 9), gamma)
}

/// Build a named grid domain from a spec, with an optional discount override.
pub fn grid_domain(name: &str, spec: GridSpec, gamma: Option<f64>) -> Result<DomainInstance> {
    let (mdp, layout) = build_grid_mdp(&spec)?;
    let mdp = match gamma {
        Some(g) if g != mdp.gamma() => rebuild_gamma(&mdp, g)?,
        _ => mdp,
    };
    let names = layout
        .cell_of_state
        .iter()
        .enumerate()
        .map(|(i, &(r, c))| {
            if i == mdp.goal() {
                "g".to_string()
            } else {
                format!("r{r}c{c}")
            }
        })
        .collect();
    Ok(DomainInstance {
        name: name.to_string(),
        mdp,
        state_names: names,
        layout: Some(layout),
    })
}

fn goal_only(gamma: f64) -> Result<DomainInstance> {
    let mdp = Mdp::new(vec![vec![vec![(0, 1.0)]]], vec![vec![0.0]], gamma, 0)?.validated()?;
    Ok(DomainInstance {
        name: "goal-only".into(),
        mdp,
        state_names: vec!["g".into()],
        layout: None,
    })
}

fn rebuild_gamma(mdp: &Mdp, gamma: f64) -> Result<Mdp> {
    let transitions = (0..mdp.n_states())
        .map(|s| {
            (0..mdp.n_actions())
                .map(|a| mdp.transitions(s, a).to_vec())
                .collect()
        })
        .collect();
    let rewards = (0..mdp.n_states())
        .map(|s| (0..mdp.n_actions()).map(|a| mdp.reward(s, a)).collect())
        .collect();
    Mdp::new(transitions, rewards, gamma, mdp.goal())
}

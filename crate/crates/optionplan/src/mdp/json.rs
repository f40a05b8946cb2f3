//! MDP interchange format.
//!
//! A single JSON document:
//! `{n_states, n_actions, gamma, goal, transitions: [[s, a, s', p], ...],
//!   rewards: [[s, a, r], ...]}`.
//! Probabilities may be doubles or decimal strings; documents are validated
//! on load. Missing (s, a) reward entries default to zero.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::mdp::Mdp;

#[derive(Debug, Serialize, Deserialize)]
struct MdpDoc {
    n_states: usize,
    n_actions: usize,
    gamma: f64,
    goal: usize,
    transitions: Vec<TransitionRow>,
    rewards: Vec<RewardRow>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TransitionRow(usize, usize, usize, #[serde(deserialize_with = "number_or_string")] f64);

#[derive(Debug, Serialize, Deserialize)]
struct RewardRow(usize, usize, #[serde(deserialize_with = "number_or_string")] f64);

fn number_or_string<'de, D>(deserializer: D) -> std::result::Result<f64, D::Error>
where
    D: Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }
    match Raw::deserialize(deserializer)? {
        Raw::Number(x) => Ok(x),
        Raw::Text(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| D::Error::custom(format!("`{s}` is not a decimal number"))),
    }
}

/// Parse and validate an MDP document.
pub fn from_json(text: &str) -> Result<Mdp> {
    let doc: MdpDoc = serde_json::from_str(text)?;
    if doc.n_states == 0 || doc.n_actions == 0 {
        return Err(Error::InvalidInput("MDP must have states and actions".into()));
    }
    let mut transitions = vec![vec![Vec::new(); doc.n_actions]; doc.n_states];
    for TransitionRow(s, a, next, p) in doc.transitions {
        if s >= doc.n_states || a >= doc.n_actions || next >= doc.n_states {
            return Err(Error::InvalidInput(format!(
                "transition ({s}, {a}, {next}) out of range"
            )));
        }
        transitions[s][a].push((next, p));
    }
    let mut rewards = vec![vec![0.0; doc.n_actions]; doc.n_states];
    for RewardRow(s, a, r) in doc.rewards {
        if s >= doc.n_states || a >= doc.n_actions {
            return Err(Error::InvalidInput(format!("reward ({s}, {a}) out of range")));
        }
        rewards[s][a] = r;
    }
    let mdp = Mdp::new(transitions, rewards, doc.gamma, doc.goal)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let report = mdp.validate();
    if !report.ok {
        let (rule, msg) = &report.violations[0];
        return Err(Error::InvalidInput(format!("{rule}: {msg}")));
    }
    Ok(mdp)
}

/// Serialize an MDP to the interchange format.
pub fn to_json(mdp: &Mdp) -> String {
    let mut transitions = Vec::new();
    let mut rewards = Vec::new();
    for s in 0..mdp.n_states() {
        for a in 0..mdp.n_actions() {
            for &(next, p) in mdp.transitions(s, a) {
                transitions.push(TransitionRow(s, a, next, p));
            }
            let r = mdp.reward(s, a);
            if r != 0.0 {
                rewards.push(RewardRow(s, a, r));
            }
        }
    }
    let doc = MdpDoc {
        n_states: mdp.n_states(),
        n_actions: mdp.n_actions(),
        gamma: mdp.gamma(),
        goal: mdp.goal(),
        transitions,
        rewards,
    };
    serde_json::to_string_pretty(&doc).expect("MDP document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::domains::builtin;

    #[test]
    fn round_trip_preserves_the_mdp() {
        for name in ["fig3", "fig6", "fourroom"] {
            let dom = builtin(name, None).unwrap();
            let text = to_json(&dom.mdp);
            let back = from_json(&text).unwrap();
            assert_eq!(back, dom.mdp, "round trip changed {name}");
        }
    }

    #[test]
    fn string_probabilities_accepted() {
        let text = r#"{
            "n_states": 2, "n_actions": 1, "gamma": 0.9, "goal": 1,
            "transitions": [[0, 0, 1, "1.0"], [1, 0, 1, 1.0]],
            "rewards": [[0, 0, "1.0"]]
        }"#;
        let mdp = from_json(text).unwrap();
        assert_eq!(mdp.transitions(0, 0), &[(1, 1.0)]);
        assert_eq!(mdp.reward(0, 0), 1.0);
    }

    #[test]
    fn bad_probability_sum_rejected() {
        let text = r#"{
            "n_states": 2, "n_actions": 1, "gamma": 0.9, "goal": 1,
            "transitions": [[0, 0, 1, 0.5], [1, 0, 1, 1.0]],
            "rewards": []
        }"#;
        let err = from_json(text).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)), "got {err}");
    }
}

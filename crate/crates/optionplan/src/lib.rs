//! Discovery of point-option sets that minimize value-iteration planning
//! time in goal-based tabular MDPs.
//!
//! The crate provides:
//!
//! - [`mdp`]: tabular MDPs, grid worlds (including the bundled four-room
//!   map), the set-cover reduction instance generator, validation, and a
//!   JSON interchange format;
//! - [`planner`]: synchronous value iteration over primitive actions and
//!   point options, with the measured convergence-iteration count;
//! - [`distance`]: the asymmetric convergence distance `d(s, s')` shared by
//!   both approximation algorithms;
//! - [`combinatorial`]: greedy set cover, asymmetric k-center, exact
//!   brute-force oracles, betweenness centrality, and Laplacian eigenpairs;
//! - [`discovery`]: the approximation algorithms, exact enumeration, greedy
//!   and graph-heuristic baselines;
//! - [`experiment`]: the sweep harness behind the CSV-emitting CLI.
//!
//! Data-parallel loops (distance pivots, candidate enumeration, sweep
//! cells) run on rayon by default; building with
//! `--no-default-features` selects the sequential fallback.

pub mod combinatorial;
pub mod discovery;
pub mod distance;
mod error;
pub mod exec;
pub mod experiment;
pub mod mdp;
pub mod planner;

pub use error::{Error, Result};

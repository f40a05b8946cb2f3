use thiserror::Error;

/// Errors produced by construction, planning, and discovery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid MDP: {0}")]
    InvalidMdp(String),

    #[error("MDP failed validation: {0}")]
    ValidationFailed(String),

    #[error("map parse error at line {line}, column {column}: {message}")]
    MapFormat {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cell ({row}, {col}) is not connected to the goal")]
    DisconnectedCell { row: usize, col: usize },

    #[error("goal set must be nonempty")]
    EmptyGoalSet,

    #[error("element {0} is not contained in any subset")]
    UncoveredElement(usize),

    #[error("invalid set-cover instance: {0}")]
    InvalidInstance(String),

    #[error("value iteration did not converge after {iterations} sweeps (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("point option must have distinct initiation and termination states (got {0})")]
    DegenerateOption(usize),

    #[error("option from {init} never terminates: {term} is unreachable under the optimal policy")]
    OptionNeverTerminates { init: usize, term: usize },

    #[error("no option set can make state {state} converge within {ell} iterations")]
    InfeasibleEll { state: usize, ell: usize },

    #[error("k must be at least 1")]
    ZeroK,

    #[error("enumeration requires {required} candidates, exceeding the budget of {budget}; try the approximation algorithm instead")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("brute-force set cover supports at most {max} subsets (got {got})")]
    TooManySubsets { max: usize, got: usize },

    #[error("graph is disconnected")]
    DisconnectedGraph,

    #[error("requested {m} eigenpairs but only {available} are available")]
    TooManyEigenpairs { m: usize, available: usize },

    #[error("unknown domain `{0}`")]
    UnknownDomain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

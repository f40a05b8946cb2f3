//! Sweep harness: run a method across a parameter range and collect one
//! record per cell for CSV emission. Cells are independent, so they fan out
//! across workers; records are sorted before emission so the output is
//! schedule-independent.

use std::time::Instant;

use crate::discovery::{
    a_mimo, a_momi, betweenness_options, eigenoptions, greedy_mimo, optimal_mimo, optimal_momi,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::mdp::Mdp;
use crate::planner::{
    measure_l_with_vstar, solve_optimal, vstar_tolerance, PointOption, ValueFunction,
};

/// One measured cell of a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub domain: String,
    pub method: String,
    pub param: usize,
    pub result: usize,
    pub wall_time_ms: u128,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "domain,method,param,result,wall_time_ms,seed";

impl ExperimentRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.domain, self.method, self.param, self.result, self.wall_time_ms, self.seed
        )
    }
}

/// Which parameter a sweep ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    K,
    Ell,
}

/// Method names accepted by the sweep and discover commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodName {
    AMomi,
    AMimo,
    OptimalMimo,
    OptimalMomi,
    Greedy,
    Betweenness,
    Eigen,
}

impl MethodName {
    pub const ALL: [MethodName; 7] = [
        MethodName::AMomi,
        MethodName::AMimo,
        MethodName::OptimalMimo,
        MethodName::OptimalMomi,
        MethodName::Greedy,
        MethodName::Betweenness,
        MethodName::Eigen,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "a-momi" => Ok(MethodName::AMomi),
            "a-mimo" => Ok(MethodName::AMimo),
            "optimal-mimo" => Ok(MethodName::OptimalMimo),
            "optimal-momi" => Ok(MethodName::OptimalMomi),
            "greedy" => Ok(MethodName::Greedy),
            "betweenness" => Ok(MethodName::Betweenness),
            "eigen" => Ok(MethodName::Eigen),
            other => Err(Error::InvalidInput(format!("unknown method `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MethodName::AMomi => "a-momi",
            MethodName::AMimo => "a-mimo",
            MethodName::OptimalMimo => "optimal-mimo",
            MethodName::OptimalMomi => "optimal-momi",
            MethodName::Greedy => "greedy",
            MethodName::Betweenness => "betweenness",
            MethodName::Eigen => "eigen",
        }
    }

    /// Whether the sweep result column carries an option count (`|O|`)
    /// rather than an iteration count.
    pub fn reports_option_count(&self) -> bool {
        matches!(self, MethodName::AMomi | MethodName::OptimalMomi)
    }
}

impl std::fmt::Display for MethodName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sweep settings shared by all cells.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub domain: String,
    pub sweep: SweepKind,
    pub params: Vec<usize>,
    pub methods: Vec<MethodName>,
    pub epsilon: f64,
    pub budget: u64,
    pub seed: u64,
    /// Evaluate betweenness and eigenoption cells as the best nonempty
    /// subset (of size at most the cell's `k`) of their four candidate
    /// options.
    pub best_subset: bool,
}

/// Number of candidate options the best-subset evaluation draws from.
pub const BASELINE_CANDIDATES: usize = 4;

/// Run every (method, param) cell and return records sorted by
/// (method, param).
pub fn run_sweep(mdp: &Mdp, config: &SweepConfig) -> Result<Vec<ExperimentRecord>> {
    if config.methods.is_empty() {
        return Err(Error::InvalidInput("no methods given".into()));
    }
    if config.params.is_empty() {
        return Err(Error::InvalidInput("empty sweep range".into()));
    }
    for m in &config.methods {
        let momi_like = m.reports_option_count();
        match config.sweep {
            SweepKind::K if momi_like => {
                return Err(Error::InvalidInput(format!(
                    "{m} sweeps over ell, not k"
                )));
            }
            SweepKind::Ell if !momi_like => {
                return Err(Error::InvalidInput(format!(
                    "{m} sweeps over k, not ell"
                )));
            }
            _ => {}
        }
    }
    let cells: Vec<(MethodName, usize)> = config
        .methods
        .iter()
        .flat_map(|&m| config.params.iter().map(move |&p| (m, p)))
        .collect();
    let results: Vec<Result<ExperimentRecord>> =
        exec::map_slice(&cells, |&(method, param)| run_cell(mdp, config, method, param));
    let mut records = results.into_iter().collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.method.cmp(&b.method).then(a.param.cmp(&b.param)));
    Ok(records)
}

fn run_cell(
    mdp: &Mdp,
    config: &SweepConfig,
    method: MethodName,
    param: usize,
) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let eps = config.epsilon;
    let result = match method {
        MethodName::AMomi => a_momi(mdp, eps, param)?.options.len(),
        MethodName::OptimalMomi => optimal_momi(mdp, eps, param, config.budget)?.options.len(),
        MethodName::AMimo => a_mimo(mdp, eps, param, config.budget)?.measured_l,
        MethodName::OptimalMimo => optimal_mimo(mdp, eps, param, config.budget)?.measured_l,
        MethodName::Greedy => greedy_mimo(mdp, eps, param)?.measured_l,
        MethodName::Betweenness => {
            let set = betweenness_options(mdp, eps, BASELINE_CANDIDATES.min(param))?;
            baseline_result(mdp, eps, param, set.options, config.best_subset)?
        }
        MethodName::Eigen => {
            let set = eigenoptions(mdp, eps, BASELINE_CANDIDATES.min(param))?;
            baseline_result(mdp, eps, param, set.options, config.best_subset)?
        }
    };
    Ok(ExperimentRecord {
        domain: config.domain.clone(),
        method: method.name().to_string(),
        param,
        result,
        wall_time_ms: start.elapsed().as_millis(),
        seed: config.seed,
    })
}

fn baseline_result(
    mdp: &Mdp,
    epsilon: f64,
    k: usize,
    candidates: Vec<PointOption>,
    best_subset: bool,
) -> Result<usize> {
    let vstar = solve_optimal(mdp, vstar_tolerance(epsilon))?;
    if !best_subset {
        return measure_l_with_vstar(mdp, &candidates, epsilon, &vstar);
    }
    best_subset_l(mdp, &candidates, epsilon, k, &vstar).map(|(l, _)| l)
}

/// Smallest iteration count over every nonempty subset of `candidates` of
/// size at most `max_size`. Returns the count and the winning subset's
/// indices into `candidates`.
pub fn best_subset_l(
    mdp: &Mdp,
    candidates: &[PointOption],
    epsilon: f64,
    max_size: usize,
    vstar: &ValueFunction,
) -> Result<(usize, Vec<usize>)> {
    let m = candidates.len();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for mask in 1u32..(1 << m) {
        let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        if subset.len() > max_size {
            continue;
        }
        let options: Vec<PointOption> =
            subset.iter().map(|&i| candidates[i].clone()).collect();
        let l = measure_l_with_vstar(mdp, &options, epsilon, vstar)?;
        if best.as_ref().is_none_or(|(bl, _)| l < *bl) {
            best = Some((l, subset));
        }
    }
    match best {
        Some(found) => Ok(found),
        None => Ok((
            measure_l_with_vstar(mdp, &[], epsilon, vstar)?,
            Vec::new(),
        )),
    }
}

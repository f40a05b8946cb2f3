//! Command-line surface: build instances, run the discovery algorithms,
//! sweep experiments to CSV, and convert set-cover instances into MDP
//! files.
//!
//! Exit codes: 0 ok, 1 infeasible, 2 input error, 3 enumeration budget
//! exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use optionplan::combinatorial::set_cover::SetCoverInstance;
use optionplan::discovery::{
    a_mimo, a_momi, betweenness_options, eigenoptions, greedy_mimo, optimal_mimo, optimal_momi,
    Method, OptionSet, DEFAULT_BUDGET,
};
use optionplan::distance::distance_matrix;
use optionplan::experiment::{run_sweep, MethodName, SweepConfig, SweepKind, CSV_HEADER};
use optionplan::mdp::domains::{builtin, grid_domain, DomainInstance, BUILTIN_DOMAINS};
use optionplan::mdp::grid::parse_map;
use optionplan::mdp::{json as mdp_json, reduction};
use optionplan::planner::{measure_l, solve_optimal, vstar_tolerance};
use optionplan::Error;

#[derive(Parser)]
#[command(name = "optionplan", version, about = "Option discovery for faster value-iteration planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// Built-in domain name (fig3, fig6, fig7, fourroom, grid9, goal-only)
    /// or a path to an MDP interchange JSON file.
    #[arg(long)]
    domain: Option<String>,
    /// Grid map file (`#` wall, `.` floor, `G` goal).
    #[arg(long)]
    map: Option<PathBuf>,
    /// Discount factor override.
    #[arg(long)]
    gamma: Option<f64>,
    /// Convergence tolerance for the iteration metric.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an MDP and print its optimal values and iteration count.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Emit the pairwise convergence-distance matrix as CSV.
    Distance {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one discovery method and print the option set as JSON (plus an
    /// ASCII map on grid domains).
    Discover {
        #[command(flatten)]
        instance: InstanceArgs,
        /// a-momi, a-mimo, optimal-mimo, optimal-momi, greedy, betweenness,
        /// or eigen.
        #[arg(long)]
        method: String,
        /// Option budget for k-constrained methods.
        #[arg(long)]
        k: Option<usize>,
        /// Iteration bound for ell-constrained methods.
        #[arg(long)]
        ell: Option<usize>,
        /// Enumeration budget (overrides OPTPLAN_BUDGET).
        #[arg(long)]
        budget: Option<u64>,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep methods over a parameter range and emit experiment records as
    /// CSV.
    Experiment {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Which parameter the range applies to: k or ell.
        #[arg(long)]
        sweep: String,
        /// Range for a k sweep: a single value or `lo..hi` (inclusive).
        #[arg(long)]
        k: Option<String>,
        /// Range for an ell sweep: a single value or `lo..hi` (inclusive).
        #[arg(long)]
        ell: Option<String>,
        /// Methods to run (repeat or comma-separate).
        #[arg(long = "method", value_delimiter = ',')]
        methods: Vec<String>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        budget: Option<u64>,
        /// Score betweenness/eigen cells by their best candidate subset.
        #[arg(long, default_value_t = false)]
        best_subset: bool,
    },
    /// Convert a set-cover instance file into an MDP interchange file.
    Reduce {
        /// JSON file: {"universe": [..], "subsets": [[..], ..]}.
        instance: PathBuf,
        /// Write the MDP JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InfeasibleEll { .. } => 1,
        Error::BudgetExceeded { .. } => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> optionplan::Result<()> {
    match cli.command {
        Command::Solve { instance } => cmd_solve(&instance),
        Command::Distance { instance, out } => cmd_distance(&instance, out.as_deref()),
        Command::Discover {
            instance,
            method,
            k,
            ell,
            budget,
            out,
        } => cmd_discover(&instance, &method, k, ell, budget, out.as_deref()),
        Command::Experiment {
            instance,
            sweep,
            k,
            ell,
            methods,
            out,
            seed,
            budget,
            best_subset,
        } => cmd_experiment(
            &instance,
            &sweep,
            k.as_deref(),
            ell.as_deref(),
            &methods,
            out.as_deref(),
            seed,
            budget,
            best_subset,
        ),
        Command::Reduce { instance, out } => cmd_reduce(&instance, out.as_deref()),
    }
}

fn load_instance(args: &InstanceArgs) -> optionplan::Result<DomainInstance> {
    if let Some(path) = &args.map {
        let text = std::fs::read_to_string(path)?;
        let spec = parse_map(&text)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "map".to_string());
        return grid_domain(&name, spec, args.gamma);
    }
    let domain = args.domain.as_deref().ok_or_else(|| {
        Error::InvalidInput("pass --domain <name|file.json> or --map <path>".into())
    })?;
    if BUILTIN_DOMAINS.contains(&domain) || domain == "goalonly" {
        return builtin(domain, args.gamma);
    }
    let path = Path::new(domain);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        let mdp = mdp_json::from_json(&text)?;
        let names = (0..mdp.n_states())
            .map(|s| {
                if s == mdp.goal() {
                    "g".to_string()
                } else {
                    format!("s{s}")
                }
            })
            .collect();
        return Ok(DomainInstance {
            name: domain.to_string(),
            mdp,
            state_names: names,
            layout: None,
        });
    }
    Err(Error::UnknownDomain(domain.to_string()))
}

fn emit(out: Option<&Path>, content: &str) -> optionplan::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_solve(args: &InstanceArgs) -> optionplan::Result<()> {
    let dom = load_instance(args)?;
    let vstar = solve_optimal(&dom.mdp, vstar_tolerance(args.epsilon))?;
    println!("domain: {}", dom.name);
    println!("states: {}  actions: {}  gamma: {}", dom.mdp.n_states(), dom.mdp.n_actions(), dom.mdp.gamma());
    for (s, name) in dom.state_names.iter().enumerate() {
        println!("V*({name}) = {:.12}", vstar.values[s]);
    }
    let l = measure_l(&dom.mdp, &[], args.epsilon)?;
    println!("L(no options) = {l}");
    Ok(())
}

fn cmd_distance(args: &InstanceArgs, out: Option<&Path>) -> optionplan::Result<()> {
    let dom = load_instance(args)?;
    let dm = distance_matrix(&dom.mdp, args.epsilon)?;
    let goal = dom.mdp.goal();
    let ids: Vec<&str> = (0..dom.mdp.n_states())
        .filter(|&s| s != goal)
        .map(|s| dom.state_names[s].as_str())
        .collect();
    let mut csv = String::from("state");
    for id in &ids {
        csv.push(',');
        csv.push_str(id);
    }
    csv.push('\n');
    for (row, s) in (0..dom.mdp.n_states()).filter(|&s| s != goal).enumerate() {
        csv.push_str(ids[row]);
        for t in (0..dom.mdp.n_states()).filter(|&t| t != goal) {
            csv.push(',');
            csv.push_str(&dm.d[s][t].to_string());
        }
        csv.push('\n');
    }
    emit(out, &csv)
}

fn resolve_budget(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("OPTPLAN_BUDGET")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_BUDGET)
}

fn cmd_discover(
    args: &InstanceArgs,
    method: &str,
    k: Option<usize>,
    ell: Option<usize>,
    budget: Option<u64>,
    out: Option<&Path>,
) -> optionplan::Result<()> {
    let dom = load_instance(args)?;
    let method = MethodName::parse(method)?;
    let budget = resolve_budget(budget);
    let eps = args.epsilon;
    let set = if method.reports_option_count() {
        let ell = ell.ok_or_else(|| Error::InvalidInput(format!("{method} needs --ell")))?;
        match method {
            MethodName::AMomi => a_momi(&dom.mdp, eps, ell)?,
            _ => optimal_momi(&dom.mdp, eps, ell, budget)?,
        }
    } else {
        let k = k.ok_or_else(|| Error::InvalidInput(format!("{method} needs --k")))?;
        if k == 0 {
            empty_set(&dom, method, eps)?
        } else {
            match method {
                MethodName::AMimo => a_mimo(&dom.mdp, eps, k, budget)?,
                MethodName::OptimalMimo => optimal_mimo(&dom.mdp, eps, k, budget)?,
                MethodName::Greedy => greedy_mimo(&dom.mdp, eps, k)?,
                MethodName::Betweenness => betweenness_options(&dom.mdp, eps, k)?,
                MethodName::Eigen => eigenoptions(&dom.mdp, eps, k)?,
                MethodName::AMomi | MethodName::OptimalMomi => unreachable!(),
            }
        }
    };
    let mut json = serde_json::to_string_pretty(&set).expect("option set serializes");
    json.push('\n');
    emit(out, &json)?;
    if let Some(layout) = &dom.layout {
        println!("{}", layout.render(&set.initiation_states()));
    }
    Ok(())
}

fn empty_set(dom: &DomainInstance, method: MethodName, epsilon: f64) -> optionplan::Result<OptionSet> {
    let tag = match method {
        MethodName::AMomi => Method::AMomi,
        MethodName::AMimo => Method::AMimo,
        MethodName::OptimalMimo | MethodName::OptimalMomi => Method::Optimal,
        MethodName::Greedy => Method::Greedy,
        MethodName::Betweenness => Method::Betweenness,
        MethodName::Eigen => Method::Eigen,
    };
    Ok(OptionSet {
        options: Vec::new(),
        method: tag,
        predicted_radius: None,
        measured_l: measure_l(&dom.mdp, &[], epsilon)?,
        expand_fallback: false,
    })
}

fn parse_range(text: &str) -> optionplan::Result<Vec<usize>> {
    if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: usize = lo
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad range `{text}`")))?;
        let hi: usize = hi
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad range `{text}`")))?;
        if hi < lo {
            return Err(Error::InvalidInput(format!("empty range `{text}`")));
        }
        Ok((lo..=hi).collect())
    } else {
        let v: usize = text
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad parameter `{text}`")))?;
        Ok(vec![v])
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    args: &InstanceArgs,
    sweep: &str,
    k: Option<&str>,
    ell: Option<&str>,
    methods: &[String],
    out: Option<&Path>,
    seed: u64,
    budget: Option<u64>,
    best_subset: bool,
) -> optionplan::Result<()> {
    let dom = load_instance(args)?;
    let (kind, range_text) = match sweep {
        "k" => (SweepKind::K, k),
        "ell" => (SweepKind::Ell, ell),
        other => {
            return Err(Error::InvalidInput(format!(
                "--sweep must be k or ell, got `{other}`"
            )))
        }
    };
    let range_text = range_text.ok_or_else(|| {
        Error::InvalidInput(format!("--sweep {sweep} needs a --{sweep} range"))
    })?;
    let params = parse_range(range_text)?;
    if methods.is_empty() {
        return Err(Error::InvalidInput("pass at least one --method".into()));
    }
    let methods = methods
        .iter()
        .map(|m| MethodName::parse(m))
        .collect::<optionplan::Result<Vec<_>>>()?;
    let config = SweepConfig {
        domain: dom.name.clone(),
        sweep: kind,
        params,
        methods,
        epsilon: args.epsilon,
        budget: resolve_budget(budget),
        seed,
        best_subset,
    };
    let records = run_sweep(&dom.mdp, &config)?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for record in &records {
        csv.push_str(&record.csv_row());
        csv.push('\n');
    }
    emit(out, &csv)
}

fn cmd_reduce(instance: &Path, out: Option<&Path>) -> optionplan::Result<()> {
    #[derive(serde::Deserialize)]
    struct InstanceDoc {
        universe: Vec<usize>,
        subsets: Vec<Vec<usize>>,
    }
    let text = std::fs::read_to_string(instance)?;
    let doc: InstanceDoc = serde_json::from_str(&text)?;
    let inst = SetCoverInstance::new(
        doc.universe.into_iter().collect(),
        doc.subsets
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
    )?;
    let (mdp, _) = reduction::from_set_cover(&inst)?;
    let mut json = mdp_json::to_json(&mdp);
    json.push('\n');
    emit(out, &json)
}

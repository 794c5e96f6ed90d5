//! Command-line front end: instance generation, single solves, oracle runs
//! and experiment sweeps.

pub mod experiment;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qcvrp::cg::{run_cg, CgConfig, ExpectationMode, Subsolver};
use qcvrp::oracle::{enumerate_routes, exact_cvrp, MAX_CVRP_LOCATIONS};
use qcvrp::{generate_instance, Error, Instance, Result};

use experiment::{ExperimentKind, ExperimentSpec, Sampling, SweepValue};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_GUARD: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) | Error::DimensionMismatch { .. } => EXIT_USAGE,
        Error::Io { .. } | Error::Schema { .. } => EXIT_IO,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Guard(_) => EXIT_GUARD,
        Error::Internal(_) => EXIT_OTHER,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qcvrp",
    version,
    about = "CVRP column generation with simulated quantum pricing"
)]
pub struct Cli {
    /// Check every converged run against exact pricing.
    #[arg(long, global = true)]
    pub verify_oracle: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Run column generation on an instance file.
    Solve(SolveArgs),
    /// Brute-force optimum of an instance file.
    Oracle(OracleArgs),
    /// Run a parameter sweep and write a CSV.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[arg(long, default_value_t = 25)]
    pub capacity: u32,
    #[arg(long, default_value_t = 1)]
    pub demand_min: u32,
    #[arg(long, default_value_t = 15)]
    pub demand_max: u32,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = positive)]
    pub customers: usize,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubsolverArg {
    Qaoansatz,
    Qaoa,
    Exact,
}

impl From<SubsolverArg> for Subsolver {
    fn from(s: SubsolverArg) -> Self {
        match s {
            SubsolverArg::Qaoansatz => Subsolver::QaoansatzSim,
            SubsolverArg::Qaoa => Subsolver::QaoaSim,
            SubsolverArg::Exact => Subsolver::ExactOracle,
        }
    }
}

/// Column-generation settings shared by `solve` and `experiment`.
#[derive(Debug, Args)]
pub struct CgArgs {
    #[arg(long, value_enum, default_value_t = SubsolverArg::Qaoansatz)]
    pub subsolver: SubsolverArg,
    /// Ansatz layers.
    #[arg(long = "p", default_value_t = 2)]
    pub p: usize,
    /// Time steps, depot start included.
    #[arg(long = "T", default_value_t = 4)]
    pub t: usize,
    /// Routes injected per iteration.
    #[arg(long = "K", default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda3: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 30)]
    pub max_iters: usize,
    /// Optimiser evaluation budget per pricing round.
    #[arg(long, default_value_t = 250)]
    pub max_evals: usize,
    /// Optimise the exact expectation value (default).
    #[arg(long, conflicts_with = "shot_expectation")]
    pub exact_expectation: bool,
    /// Optimise the mean energy of `--shots` samples.
    #[arg(long)]
    pub shot_expectation: bool,
    /// Reuse the previous iteration's angles as the starting point.
    #[arg(long)]
    pub warm_start: bool,
}

impl CgArgs {
    pub fn to_config(&self, seed: u64, verify_oracle: bool) -> CgConfig {
        let mut cfg = CgConfig {
            t_steps: self.t,
            k_routes: self.k,
            subsolver: self.subsolver.into(),
            layers: self.p,
            shots: self.shots,
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            lambda3: self.lambda3,
            convergence_eps: self.eps,
            max_iterations: self.max_iters,
            seed,
            expectation: if self.shot_expectation {
                ExpectationMode::Shots
            } else {
                ExpectationMode::Exact
            },
            verify_oracle,
            warm_start: self.warm_start,
            ..CgConfig::default()
        };
        cfg.optimizer.max_evals = self.max_evals;
        cfg
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub cg: CgArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration log (JSONL); defaults to `<instance>.iterations.jsonl`.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Summary record (JSON); defaults to `<instance>.summary.json`.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub instance: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentArg {
    #[value(name = "compare_mixers", alias = "compare-mixers")]
    CompareMixers,
    #[value(name = "layer_sweep", alias = "layer-sweep")]
    LayerSweep,
    #[value(name = "time_sweep", alias = "time-sweep")]
    TimeSweep,
    #[value(name = "k_sweep", alias = "k-sweep")]
    KSweep,
}

impl From<ExperimentArg> for ExperimentKind {
    fn from(e: ExperimentArg) -> Self {
        match e {
            ExperimentArg::CompareMixers => ExperimentKind::CompareMixers,
            ExperimentArg::LayerSweep => ExperimentKind::LayerSweep,
            ExperimentArg::TimeSweep => ExperimentKind::TimeSweep,
            ExperimentArg::KSweep => ExperimentKind::KSweep,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub experiment: ExperimentArg,
    /// Defaults to the experiment's usual size.
    #[arg(long)]
    pub customers: Option<usize>,
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Comma-separated sweep values (`qaoa,qaoansatz` or integers).
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep one instance per point and vary the solver seed instead.
    #[arg(long)]
    pub solver_seeds: bool,
    #[command(flatten)]
    pub cg: CgArgs,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let inst = generate_instance(
        args.seed,
        args.customers,
        args.instance.capacity,
        args.instance.demand_min,
        args.instance.demand_max,
    )?;
    inst.save(&args.out)?;
    writeln!(out, "{}", args.out.display()).map_err(io_err(Path::new("<stdout>")))
}

#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub subsolver: Subsolver,
    pub converged: bool,
    pub iterations: usize,
    pub final_distance: f64,
    pub final_lp_objective: f64,
    pub wall_time_ms: f64,
    pub routes: Vec<String>,
    pub oracle_distance: Option<f64>,
    /// Set when the integer solution over the generated columns is worse than the true optimum.
    pub integrality_gap: Option<bool>,
}

pub fn cmd_solve(args: &SolveArgs, verify_oracle: bool, out: &mut dyn Write) -> Result<()> {
    let inst = Instance::load(&args.instance)?;
    let cfg = args.cg.to_config(args.seed, verify_oracle);
    let res = run_cg(&inst, &cfg)?;

    let log_path = args
        .log
        .clone()
        .unwrap_or_else(|| with_suffix(&args.instance, ".iterations.jsonl"));
    let mut log = create(&log_path)?;
    res.write_jsonl(&mut log)?;
    log.flush().map_err(io_err(&log_path))?;

    let oracle_distance = if (verify_oracle || cfg.subsolver == Subsolver::ExactOracle)
        && inst.n_locations() <= MAX_CVRP_LOCATIONS
    {
        Some(exact_cvrp(&inst)?.objective)
    } else {
        None
    };
    let summary = SolveSummary {
        subsolver: cfg.subsolver,
        converged: res.converged,
        iterations: res.logs.len(),
        final_distance: res.total_distance,
        final_lp_objective: res.final_lp_objective,
        wall_time_ms: res.wall_time_ms,
        routes: res
            .final_solution
            .routes
            .iter()
            .map(|r| r.to_string())
            .collect(),
        integrality_gap: oracle_distance.map(|d| res.total_distance > d + 1e-9),
        oracle_distance,
    };
    let summary_path = args
        .summary
        .clone()
        .unwrap_or_else(|| with_suffix(&args.instance, ".summary.json"));
    let text =
        serde_json::to_string_pretty(&summary).map_err(|e| Error::Internal(e.to_string()))?;
    std::fs::write(&summary_path, text + "\n").map_err(io_err(&summary_path))?;

    let o = io_err(Path::new("<stdout>"));
    let mut lines = vec![format!(
        "converged: {}  iterations: {}  distance: {:.6}",
        res.converged,
        res.logs.len(),
        res.total_distance
    )];
    lines.extend(
        res.final_solution
            .routes
            .iter()
            .map(|r| format!("  {r}  ({:.6})", r.distance())),
    );
    if summary.integrality_gap == Some(true) {
        lines.push(format!(
            "note: exact optimum is {:.6}; the generated columns do not contain it",
            oracle_distance.unwrap_or_default()
        ));
    }
    writeln!(out, "{}", lines.join("\n")).map_err(o)
}

pub fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<()> {
    let inst = Instance::load(&args.instance)?;
    let all = enumerate_routes(&inst)?;
    let best = exact_cvrp(&inst)?;
    let mut lines = vec![
        format!("feasible routes: {}", all.len()),
        format!("optimal distance: {:.6}", best.objective),
    ];
    lines.extend(
        best.routes
            .iter()
            .map(|r| format!("  {r}  ({:.6})", r.distance())),
    );
    writeln!(out, "{}", lines.join("\n")).map_err(io_err(Path::new("<stdout>")))
}

fn parse_values(kind: ExperimentKind, raw: &[String]) -> Result<Vec<SweepValue>> {
    if raw.is_empty() {
        return Ok(kind.default_values());
    }
    raw.iter()
        .map(|s| match (kind, s.trim()) {
            (ExperimentKind::CompareMixers, "qaoa") => Ok(SweepValue::Solver(Subsolver::QaoaSim)),
            (ExperimentKind::CompareMixers, "qaoansatz") => {
                Ok(SweepValue::Solver(Subsolver::QaoansatzSim))
            }
            (ExperimentKind::CompareMixers, "exact") => {
                Ok(SweepValue::Solver(Subsolver::ExactOracle))
            }
            (ExperimentKind::CompareMixers, other) => {
                Err(Error::Parameter(format!("unknown subsolver '{other}'")))
            }
            (_, other) => other
                .parse()
                .map(SweepValue::Int)
                .map_err(|_| Error::Parameter(format!("sweep value '{other}' is not an integer"))),
        })
        .collect()
}

pub fn build_spec(args: &ExperimentArgs, verify_oracle: bool) -> Result<ExperimentSpec> {
    let kind: ExperimentKind = args.experiment.into();
    let mut spec = ExperimentSpec::new(kind);
    if let Some(n) = args.customers {
        spec.n_customers = n;
    }
    spec.capacity = args.instance.capacity;
    spec.demand_min = args.instance.demand_min;
    spec.demand_max = args.instance.demand_max;
    spec.values = parse_values(kind, &args.values)?;
    spec.samples_per_point = args.samples;
    spec.base_seed = args.seed;
    spec.sampling = if args.solver_seeds {
        Sampling::SolverSeeds
    } else {
        Sampling::InstanceSeeds
    };
    spec.base = args.cg.to_config(args.seed, verify_oracle);
    spec.validate()?;
    Ok(spec)
}

pub fn cmd_experiment(
    args: &ExperimentArgs,
    verify_oracle: bool,
    out: &mut dyn Write,
) -> Result<()> {
    let spec = build_spec(args, verify_oracle)?;
    let rows = experiment::run_experiment(&spec)?;
    match &args.out {
        Some(path) => {
            let mut f = create(path)?;
            experiment::write_csv(&rows, &mut f)?;
            f.flush().map_err(io_err(path))?;
            writeln!(out, "{}", path.display()).map_err(io_err(Path::new("<stdout>")))
        }
        None => experiment::write_csv(&rows, out),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Solve(a) => cmd_solve(a, cli.verify_oracle, out),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Experiment(a) => cmd_experiment(a, cli.verify_oracle, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            exit_code(&Error::Parameter(String::new())),
            exit_code(&Error::Io {
                path: "x".into(),
                source: std::io::Error::other("x"),
            }),
            exit_code(&Error::Infeasible(String::new())),
            exit_code(&Error::Guard(String::new())),
        ];
        let mut sorted = codes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        assert!(codes.iter().all(|&c| c != EXIT_OK));
    }

    #[test]
    fn sweep_values_parse() {
        let v = parse_values(
            ExperimentKind::CompareMixers,
            &["qaoa".into(), "qaoansatz".into()],
        )
        .unwrap();
        assert_eq!(v[0], SweepValue::Solver(Subsolver::QaoaSim));
        assert!(parse_values(ExperimentKind::KSweep, &["x".into()]).is_err());
        assert_eq!(
            parse_values(ExperimentKind::LayerSweep, &[]).unwrap(),
            ExperimentKind::LayerSweep.default_values()
        );
    }

    #[test]
    fn cli_flags_parse() {
        let cli = Cli::try_parse_from([
            "qcvrp",
            "--verify-oracle",
            "solve",
            "i.json",
            "--subsolver",
            "qaoa",
            "--p",
            "3",
            "--T",
            "5",
            "--K",
            "4",
            "--shot-expectation",
        ])
        .unwrap();
        assert!(cli.verify_oracle);
        let Command::Solve(a) = cli.command else {
            panic!()
        };
        let cfg = a.cg.to_config(a.seed, cli.verify_oracle);
        assert_eq!((cfg.layers, cfg.t_steps, cfg.k_routes), (3, 5, 4));
        assert_eq!(cfg.expectation, ExpectationMode::Shots);
        assert_eq!(cfg.subsolver, Subsolver::QaoaSim);
        assert!(Cli::try_parse_from([
            "qcvrp",
            "solve",
            "i",
            "--exact-expectation",
            "--shot-expectation"
        ])
        .is_err());
    }
}

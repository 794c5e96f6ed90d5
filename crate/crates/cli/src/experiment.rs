//! Parameter sweeps producing one tidy CSV per experiment.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use qcvrp::cg::{run_cg, CgConfig, Subsolver};
use qcvrp::oracle::{exact_cvrp, MAX_CVRP_LOCATIONS};
use qcvrp::{generate_instance, Error, Result};

/// Bumped whenever the CSV columns change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "QCVRP_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// QAOA against the XY ring ansatz.
    CompareMixers,
    LayerSweep,
    TimeSweep,
    KSweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CompareMixers => "compare_mixers",
            ExperimentKind::LayerSweep => "layer_sweep",
            ExperimentKind::TimeSweep => "time_sweep",
            ExperimentKind::KSweep => "k_sweep",
        }
    }

    pub fn default_customers(self) -> usize {
        match self {
            ExperimentKind::CompareMixers => 4,
            ExperimentKind::LayerSweep | ExperimentKind::TimeSweep => 5,
            ExperimentKind::KSweep => 6,
        }
    }

    pub fn default_values(self) -> Vec<SweepValue> {
        match self {
            ExperimentKind::CompareMixers => vec![
                SweepValue::Solver(Subsolver::QaoaSim),
                SweepValue::Solver(Subsolver::QaoansatzSim),
            ],
            ExperimentKind::LayerSweep => [1, 2, 3].map(SweepValue::Int).to_vec(),
            ExperimentKind::TimeSweep => [2, 3, 4, 5].map(SweepValue::Int).to_vec(),
            ExperimentKind::KSweep => [1, 5, 10].map(SweepValue::Int).to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepValue {
    Solver(Subsolver),
    Int(usize),
}

impl std::fmt::Display for SweepValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepValue::Solver(Subsolver::QaoaSim) => write!(f, "qaoa"),
            SweepValue::Solver(Subsolver::QaoansatzSim) => write!(f, "qaoansatz"),
            SweepValue::Solver(Subsolver::ExactOracle) => write!(f, "exact"),
            SweepValue::Int(v) => write!(f, "{v}"),
        }
    }
}

/// What varies between the samples of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// A fresh random instance per sample.
    InstanceSeeds,
    /// One instance, a fresh solver seed per sample.
    SolverSeeds,
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n_customers: usize,
    pub capacity: u32,
    pub demand_min: u32,
    pub demand_max: u32,
    pub values: Vec<SweepValue>,
    pub samples_per_point: usize,
    pub base_seed: u64,
    pub sampling: Sampling,
    /// Settings shared by every run; the swept field is overwritten per point.
    pub base: CgConfig,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            n_customers: kind.default_customers(),
            capacity: 25,
            demand_min: 1,
            demand_max: 15,
            values: kind.default_values(),
            samples_per_point: 10,
            base_seed: 0,
            sampling: Sampling::InstanceSeeds,
            base: CgConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Parameter("sweep needs at least one value".into()));
        }
        if self.samples_per_point == 0 {
            return Err(Error::Parameter("samples per point must be >= 1".into()));
        }
        let ok = self.values.iter().all(|v| match (self.kind, v) {
            (ExperimentKind::CompareMixers, SweepValue::Solver(_)) => true,
            (ExperimentKind::CompareMixers, _) | (_, SweepValue::Solver(_)) => false,
            (_, SweepValue::Int(_)) => true,
        });
        if !ok {
            return Err(Error::Parameter(format!(
                "sweep values do not fit {}",
                self.kind.name()
            )));
        }
        Ok(())
    }

    fn config_for(&self, value: SweepValue, solver_seed: u64) -> CgConfig {
        let mut cfg = self.base.clone();
        cfg.seed = solver_seed;
        match (self.kind, value) {
            (ExperimentKind::CompareMixers, SweepValue::Solver(s)) => cfg.subsolver = s,
            (ExperimentKind::LayerSweep, SweepValue::Int(p)) => cfg.layers = p,
            (ExperimentKind::TimeSweep, SweepValue::Int(t)) => cfg.t_steps = t,
            (ExperimentKind::KSweep, SweepValue::Int(k)) => cfg.k_routes = k,
            _ => unreachable!("validated"),
        }
        cfg
    }

    /// `(instance seed, solver seed)` of sample `s`.
    fn seeds(&self, s: usize) -> (u64, u64) {
        let sample = self.base_seed + s as u64;
        match self.sampling {
            Sampling::InstanceSeeds => (sample, sample),
            Sampling::SolverSeeds => (self.base_seed, sample),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub experiment: &'static str,
    pub sweep_value: String,
    pub seed: u64,
    pub iteration: Option<usize>,
    pub min_reduced_cost: Option<f64>,
    pub lp_objective: Option<f64>,
    pub final_distance: Option<f64>,
    pub oracle_distance: Option<f64>,
    /// `converged`, `max_iterations` or `error: <message>`.
    pub status: String,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn run_point(spec: &ExperimentSpec, value: SweepValue, s: usize) -> Vec<CsvRow> {
    let (inst_seed, solver_seed) = spec.seeds(s);
    let row = |iteration, min_rc, lp, fin, oracle, status: String| CsvRow {
        experiment: spec.kind.name(),
        sweep_value: value.to_string(),
        seed: spec.base_seed + s as u64,
        iteration,
        min_reduced_cost: min_rc,
        lp_objective: lp,
        final_distance: fin,
        oracle_distance: oracle,
        status,
    };
    let attempt = || -> Result<Vec<CsvRow>> {
        let inst = generate_instance(
            inst_seed,
            spec.n_customers,
            spec.capacity,
            spec.demand_min,
            spec.demand_max,
        )?;
        let oracle = if inst.n_locations() <= MAX_CVRP_LOCATIONS {
            Some(exact_cvrp(&inst)?.objective)
        } else {
            None
        };
        let res = run_cg(&inst, &spec.config_for(value, solver_seed))?;
        let status = if res.converged {
            "converged"
        } else {
            "max_iterations"
        };
        if res.logs.is_empty() {
            return Ok(vec![row(
                None,
                None,
                None,
                Some(res.total_distance),
                oracle,
                status.to_string(),
            )]);
        }
        Ok(res
            .logs
            .iter()
            .map(|l| {
                row(
                    Some(l.iteration),
                    finite(l.min_reduced_cost),
                    Some(l.lp_objective),
                    Some(res.total_distance),
                    oracle,
                    status.to_string(),
                )
            })
            .collect())
    };
    attempt().unwrap_or_else(|e| vec![row(None, None, None, None, None, format!("error: {e}"))])
}

/// Worker count from [`WORKERS_ENV`], else rayon's default.
pub fn worker_count() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
}

/// Runs every (sweep value, sample) pair; rows come back ordered by that pair.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<CsvRow>> {
    spec.validate()?;
    let jobs: Vec<(SweepValue, usize)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..spec.samples_per_point).map(move |s| (v, s)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
    let per_job: Vec<Vec<CsvRow>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(v, s)| run_point(spec, v, s))
            .collect()
    });
    Ok(per_job.into_iter().flatten().collect())
}

pub fn write_csv(rows: &[CsvRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: e,
    })
}

//! Column generation: master LP, pricing, column injection and the final
//! integer solve.

mod decode;

pub use decode::{decode_bitstring, decode_samples, step_locations, Decoded};

use std::io::Write;
use std::time::Instant;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::master::{
    initial_route_set, solve_rmp_integer, solve_rmp_lp, DualSolution, RmpIntSolution, Route,
    RouteSet,
};
use crate::optimizer::{minimize, InitialParams, OptimizerConfig};
use crate::oracle::{enumerate_routes, EnumeratedRoutes};
use crate::qubo::{add_onehot_penalty, build_alim_qubo, qubo_to_ising, SubproblemSpec, VarLayout};
use crate::simulator::{Ansatz, AnsatzConfig, MixerKind, Params};

/// Version tag written into every iteration-log record.
pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subsolver {
    /// XY ring mixer ansatz.
    QaoansatzSim,
    /// Plain QAOA with the one-hot penalty.
    QaoaSim,
    /// Exhaustive enumeration.
    ExactOracle,
}

/// How the variational objective is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectationMode {
    /// `<psi|H_C|psi>` from the statevector.
    Exact,
    /// Mean energy over `shots` samples per evaluation.
    Shots,
}

#[derive(Debug, Clone)]
pub struct CgConfig {
    pub t_steps: usize,
    /// Routes injected per iteration.
    pub k_routes: usize,
    pub subsolver: Subsolver,
    pub layers: usize,
    pub shots: u64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub convergence_eps: f64,
    pub max_iterations: usize,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    pub expectation: ExpectationMode,
    /// Confirm a sampled "no negative column" with exact pricing before stopping.
    pub verify_oracle: bool,
    /// Start each optimisation from the previous iteration's best angles.
    pub warm_start: bool,
}

impl Default for CgConfig {
    fn default() -> Self {
        Self {
            t_steps: 4,
            k_routes: 10,
            subsolver: Subsolver::QaoansatzSim,
            layers: 2,
            shots: 1000,
            lambda1: 1.0,
            lambda2: 1.0,
            lambda3: 1.0,
            convergence_eps: 1e-6,
            max_iterations: 30,
            seed: 0,
            optimizer: OptimizerConfig::default(),
            expectation: ExpectationMode::Exact,
            verify_oracle: false,
            warm_start: false,
        }
    }
}

impl CgConfig {
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        let n = instance.n_locations();
        if self.t_steps < 2 || self.t_steps > n {
            return Err(Error::Parameter(format!(
                "T must lie in 2..={n} for this instance, got {}",
                self.t_steps
            )));
        }
        if self.k_routes == 0 {
            return Err(Error::Parameter("K must be >= 1".into()));
        }
        if !(self.convergence_eps >= 0.0) {
            return Err(Error::Parameter("convergence_eps must be >= 0".into()));
        }
        if self.subsolver != Subsolver::ExactOracle {
            if self.layers == 0 {
                return Err(Error::Parameter("p must be >= 1".into()));
            }
            if self.shots == 0 {
                return Err(Error::Parameter("shots must be >= 1".into()));
            }
        }
        Ok(())
    }
}

fn non_finite_as_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn opt_non_finite_as_null<S: Serializer>(
    v: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => non_finite_as_null(x, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CgIterationLog {
    pub log_version: u32,
    pub iteration: usize,
    pub lp_objective: f64,
    pub duals: Vec<f64>,
    /// Best reduced cost among decoded candidates; `null` when nothing feasible was sampled.
    #[serde(serialize_with = "non_finite_as_null")]
    pub min_reduced_cost: f64,
    pub routes_added: usize,
    pub infeasible_sample_count: u64,
    /// No new negative column was found this iteration.
    pub stalled: bool,
    #[serde(serialize_with = "opt_non_finite_as_null")]
    pub oracle_min_reduced_cost: Option<f64>,
    pub optimizer_evals: usize,
    pub route_pool_size: usize,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct CgResult {
    pub logs: Vec<CgIterationLog>,
    pub final_routes: RouteSet,
    /// LP objective over `final_routes`.
    pub final_lp_objective: f64,
    pub final_duals: DualSolution,
    pub final_solution: RmpIntSolution,
    pub converged: bool,
    /// Iteration at which convergence was declared.
    pub converged_at: Option<usize>,
    pub total_distance: f64,
    pub wall_time_ms: f64,
}

impl CgResult {
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for log in &self.logs {
            let line = serde_json::to_string(log).map_err(|e| Error::Internal(e.to_string()))?;
            writeln!(out, "{line}").map_err(|e| Error::Io {
                path: "<iteration log>".into(),
                source: e,
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PricingOutcome {
    /// Feasible routes, best reduced cost first.
    pub candidates: Vec<(Route, f64)>,
    /// `+inf` if no feasible sample was decoded.
    pub best: f64,
    pub infeasible_shots: u64,
    pub optimizer_evals: usize,
    pub best_params: Option<Params>,
}

/// Deterministic 64-bit mix of a seed and a stream tag.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One pricing round.
///
/// `enumerated` is only consulted by the exact subsolver; it is built on the
/// fly when `None`. `initial` overrides the optimiser's starting angles.
pub fn price_once(
    instance: &Instance,
    duals: &DualSolution,
    config: &CgConfig,
    seed: u64,
    enumerated: Option<&EnumeratedRoutes>,
    initial: Option<InitialParams>,
) -> Result<PricingOutcome> {
    config.validate(instance)?;
    let max_customers = config.t_steps - 1;
    let kind = match config.subsolver {
        Subsolver::ExactOracle => {
            let owned;
            let all = match enumerated {
                Some(e) => e,
                None => {
                    owned = enumerate_routes(instance)?;
                    &owned
                }
            };
            let candidates = all.ranked_by_reduced_cost(duals, max_customers);
            let best = candidates.first().map_or(0.0, |c| c.1.min(0.0));
            return Ok(PricingOutcome {
                candidates,
                best,
                infeasible_shots: 0,
                optimizer_evals: 0,
                best_params: None,
            });
        }
        Subsolver::QaoansatzSim => MixerKind::XyRing,
        Subsolver::QaoaSim => MixerKind::XMixer,
    };

    let spec = SubproblemSpec {
        instance,
        duals,
        t_steps: config.t_steps,
        lambda1: config.lambda1,
        lambda2: config.lambda2,
        lambda3: config.lambda3,
    };
    let mut qubo = build_alim_qubo(&spec)?;
    if kind == MixerKind::XMixer {
        qubo = add_onehot_penalty(&qubo, &spec);
    }
    let h_c = qubo_to_ising(&qubo);
    let layout = VarLayout {
        n_locations: instance.n_locations(),
        t_steps: config.t_steps,
    };
    let ansatz = Ansatz::for_pricing(AnsatzConfig::new(kind, config.layers, layout), &h_c)?;

    let mut opt_cfg = config.optimizer.clone();
    opt_cfg.seed = derive_seed(seed, 2);
    if let Some(init) = initial {
        opt_cfg.initial = init;
    }
    let shot_seed = derive_seed(seed, 3);
    let mut eval_idx = 0u64;
    let mut failure: Option<Error> = None;
    let opt = minimize(
        |p| {
            let r = match config.expectation {
                ExpectationMode::Exact => ansatz.expectation(p),
                ExpectationMode::Shots => {
                    eval_idx += 1;
                    ansatz.sampled_energy(p, config.shots, derive_seed(shot_seed, eval_idx))
                }
            };
            r.unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::INFINITY
            })
        },
        config.layers,
        &opt_cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }

    let samples = ansatz.sample(&opt.best_params, config.shots, derive_seed(seed, 1))?;
    let decoded = decode_samples(&samples, instance, config.t_steps, duals);
    let best = decoded.candidates.first().map_or(f64::INFINITY, |c| c.1);
    Ok(PricingOutcome {
        candidates: decoded.candidates,
        best,
        infeasible_shots: decoded.infeasible_shots,
        optimizer_evals: opt.n_evals,
        best_params: Some(opt.best_params),
    })
}

/// Adds up to `k` routes with reduced cost below `-eps`, most negative first.
fn inject(routes: &mut RouteSet, candidates: &[(Route, f64)], k: usize, eps: f64) -> usize {
    let mut added = 0;
    for (route, rc) in candidates {
        if added == k || *rc >= -eps {
            break;
        }
        if route.is_empty() || routes.contains(route) {
            continue;
        }
        if routes.insert(route.clone()) {
            added += 1;
        }
    }
    added
}

pub fn run_cg(instance: &Instance, config: &CgConfig) -> Result<CgResult> {
    config.validate(instance)?;
    let start = Instant::now();
    let needs_oracle = config.subsolver == Subsolver::ExactOracle || config.verify_oracle;
    let enumerated = if needs_oracle {
        Some(enumerate_routes(instance)?)
    } else {
        None
    };

    let mut routes = initial_route_set(instance);
    let mut logs = Vec::new();
    let mut converged_at = None;
    let mut stalls = 0usize;
    let mut prev_params: Option<Params> = None;
    let mut last_lp = None;

    for iteration in 1..=config.max_iterations {
        let t0 = Instant::now();
        let lp = solve_rmp_lp(&routes, instance).map_err(|e| match e {
            Error::Infeasible(m) => Error::Internal(format!("master LP infeasible: {m}")),
            other => other,
        })?;
        let iter_seed = derive_seed(config.seed, iteration as u64);
        let initial = if stalls > 0 {
            Some(InitialParams::Jittered)
        } else if config.warm_start {
            prev_params.clone().map(InitialParams::Fixed)
        } else {
            None
        };
        let priced = price_once(
            instance,
            &lp.duals,
            config,
            iter_seed,
            enumerated.as_ref(),
            initial,
        )?;
        if priced.best_params.is_some() {
            prev_params = priced.best_params.clone();
        }
        let pool_before = routes.len();
        let added = inject(
            &mut routes,
            &priced.candidates,
            config.k_routes,
            config.convergence_eps,
        );
        let stalled = added == 0;

        let mut oracle_min = None;
        let mut done = false;
        if stalled {
            if config.subsolver == Subsolver::ExactOracle {
                done = true;
            } else if let Some(all) = enumerated.as_ref() {
                let (_, rc) = all.min_reduced_cost(&lp.duals, config.t_steps);
                oracle_min = Some(rc);
                done = rc >= -config.convergence_eps;
            } else {
                done = stalls + 1 >= 2;
            }
            stalls += 1;
        } else {
            stalls = 0;
        }

        logs.push(CgIterationLog {
            log_version: LOG_VERSION,
            iteration,
            lp_objective: lp.objective,
            duals: lp.duals.values().to_vec(),
            min_reduced_cost: priced.best,
            routes_added: added,
            infeasible_sample_count: priced.infeasible_shots,
            stalled,
            oracle_min_reduced_cost: oracle_min,
            optimizer_evals: priced.optimizer_evals,
            route_pool_size: pool_before,
            wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
        });
        if done {
            converged_at = Some(iteration);
            last_lp = Some(lp);
            break;
        }
    }

    let lp = match last_lp {
        Some(lp) => lp,
        None => solve_rmp_lp(&routes, instance)?,
    };
    let final_solution = solve_rmp_integer(&routes, instance)?;
    Ok(CgResult {
        logs,
        final_lp_objective: lp.objective,
        final_duals: lp.duals,
        total_distance: final_solution.objective,
        final_solution,
        final_routes: routes,
        converged: converged_at.is_some(),
        converged_at,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

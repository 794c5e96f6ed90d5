//! Derivative-free minimisation of the variational angles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::simulator::Params;

/// Default starting angle for every `gamma_k` and `beta_k`.
pub const DEFAULT_INITIAL_ANGLE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialParams {
    /// Every angle at [`DEFAULT_INITIAL_ANGLE`].
    Default,
    Fixed(Params),
    /// Default angles jittered uniformly by up to `initial_step`, drawn from `seed`.
    Jittered,
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub max_evals: usize,
    pub initial: InitialParams,
    pub initial_step: f64,
    /// Stop once the simplex's objective spread falls to this value.
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evals: 250,
            initial: InitialParams::Default,
            initial_step: 0.25,
            convergence_tol: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptResult {
    pub best_params: Params,
    pub best_value: f64,
    pub n_evals: usize,
    /// Every evaluation as `(index, value)`, in order.
    pub trace: Vec<(usize, f64)>,
}

impl OptResult {
    /// Running minimum of the trace.
    pub fn incumbents(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.trace
            .iter()
            .map(|&(_, v)| {
                best = best.min(v);
                best
            })
            .collect()
    }
}

/// Local optimiser over `2p` flat angles.
pub trait Minimizer {
    fn minimize(
        &self,
        objective: &mut dyn FnMut(&Params) -> f64,
        layers: usize,
        config: &OptimizerConfig,
    ) -> Result<OptResult>;
}

/// Nelder-Mead with reflection 1, expansion 2, contraction 1/2 and shrink `1 - 1/n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NelderMead;

pub fn minimize(
    mut objective: impl FnMut(&Params) -> f64,
    layers: usize,
    config: &OptimizerConfig,
) -> Result<OptResult> {
    NelderMead.minimize(&mut objective, layers, config)
}

fn starting_point(layers: usize, config: &OptimizerConfig) -> Result<Vec<f64>> {
    match &config.initial {
        InitialParams::Default => Ok(vec![DEFAULT_INITIAL_ANGLE; 2 * layers]),
        InitialParams::Fixed(p) => {
            if p.layers() != layers {
                return Err(Error::DimensionMismatch {
                    expected: layers,
                    actual: p.layers(),
                });
            }
            Ok(p.to_flat())
        }
        InitialParams::Jittered => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            Ok((0..2 * layers)
                .map(|_| DEFAULT_INITIAL_ANGLE + config.initial_step * rng.gen_range(-1.0..1.0))
                .collect())
        }
    }
}

struct Budget<'a> {
    objective: &'a mut dyn FnMut(&Params) -> f64,
    max: usize,
    trace: Vec<(usize, f64)>,
    best: Option<(Vec<f64>, f64)>,
}

impl Budget<'_> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.trace.len() >= self.max {
            return None;
        }
        let params = Params::from_flat(x).expect("even length");
        let mut v = (self.objective)(&params);
        if v.is_nan() {
            v = f64::INFINITY;
        }
        self.trace.push((self.trace.len(), v));
        if self.best.as_ref().is_none_or(|b| v < b.1) {
            self.best = Some((x.to_vec(), v));
        }
        Some(v)
    }
}

impl Minimizer for NelderMead {
    fn minimize(
        &self,
        objective: &mut dyn FnMut(&Params) -> f64,
        layers: usize,
        config: &OptimizerConfig,
    ) -> Result<OptResult> {
        if config.max_evals == 0 {
            return Err(Error::Parameter("max_evals must be >= 1".into()));
        }
        if layers == 0 {
            return Err(Error::Parameter("at least one layer is required".into()));
        }
        if !(config.initial_step > 0.0) {
            return Err(Error::Parameter("initial_step must be > 0".into()));
        }
        let x0 = starting_point(layers, config)?;
        let n = x0.len();
        let mut budget = Budget {
            objective,
            max: config.max_evals,
            trace: Vec::new(),
            best: None,
        };
        run_simplex(&mut budget, x0, n, config);
        let (x, v) = budget.best.expect("at least one evaluation");
        Ok(OptResult {
            best_params: Params::from_flat(&x)?,
            best_value: v,
            n_evals: budget.trace.len(),
            trace: budget.trace,
        })
    }
}

fn run_simplex(budget: &mut Budget<'_>, x0: Vec<f64>, n: usize, config: &OptimizerConfig) {
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    let sigma = if n > 1 { 1.0 - 1.0 / n as f64 } else { 0.5 };

    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let Some(f0) = budget.eval(&x0) else { return };
    pts.push((x0.clone(), f0));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += config.initial_step;
        let Some(f) = budget.eval(&x) else { return };
        pts.push((x, f));
    }

    loop {
        // Stable sort keeps earlier vertices first on ties.
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = pts[0].1;
        let worst = pts[n].1;
        if worst - best <= config.convergence_tol {
            return;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(ALPHA, &pts[n].0);
        let Some(fr) = budget.eval(&xr) else { return };
        if fr < best {
            let xe = along(GAMMA, &pts[n].0);
            let Some(fe) = budget.eval(&xe) else { return };
            pts[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < pts[n - 1].1 {
            pts[n] = (xr, fr);
            continue;
        }
        // Outside contraction if the reflection improved on the worst, inside otherwise.
        let (xc, fc) = if fr < worst {
            let xc = along(ALPHA * RHO, &pts[n].0);
            let Some(fc) = budget.eval(&xc) else { return };
            (xc, fc)
        } else {
            let xc = along(-RHO, &pts[n].0);
            let Some(fc) = budget.eval(&xc) else { return };
            (xc, fc)
        };
        if fc < fr.min(worst) {
            pts[n] = (xc, fc);
            continue;
        }
        let x_best = pts[0].0.clone();
        for p in pts.iter_mut().skip(1) {
            let xs: Vec<f64> = x_best
                .iter()
                .zip(&p.0)
                .map(|(b, v)| b + sigma * (v - b))
                .collect();
            let Some(fs) = budget.eval(&xs) else { return };
            *p = (xs, fs);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_quadratic_converges() {
        let cfg = OptimizerConfig {
            max_evals: 200,
            ..Default::default()
        };
        let r = minimize(
            |p| (p.gammas[0] - 0.3).powi(2) + (p.betas[0] - 0.1).powi(2),
            1,
            &cfg,
        )
        .unwrap();
        assert!(r.n_evals <= 200);
        assert!((r.best_params.gammas[0] - 0.3).abs() < 1e-3, "{r:?}");
        assert!((r.best_params.betas[0] - 0.1).abs() < 1e-3, "{r:?}");
    }

    #[test]
    fn constant_objective_keeps_initial_params() {
        let r = minimize(|_| 4.2, 2, &OptimizerConfig::default()).unwrap();
        assert_eq!(r.best_params, Params::constant(2, DEFAULT_INITIAL_ANGLE));
        assert_eq!(r.best_value, 4.2);
    }

    #[test]
    fn zero_budget_rejected() {
        let cfg = OptimizerConfig {
            max_evals: 0,
            ..Default::default()
        };
        assert!(matches!(
            minimize(|_| 0.0, 1, &cfg),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn budget_respected_and_best_is_trace_min() {
        let cfg = OptimizerConfig {
            max_evals: 17,
            ..Default::default()
        };
        let r = minimize(
            |p| p.to_flat().iter().map(|v| (v - 1.0).powi(2)).sum(),
            2,
            &cfg,
        )
        .unwrap();
        assert_eq!(r.n_evals, 17);
        let min = r.trace.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_value, min);
        assert!(r.best_value <= r.trace[0].1);
        let inc = r.incumbents();
        assert!(inc.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn deterministic() {
        let cfg = OptimizerConfig {
            initial: InitialParams::Jittered,
            seed: 9,
            ..Default::default()
        };
        let f = |p: &Params| (p.gammas[0] * 3.0).sin() + p.betas[0].powi(2);
        let a = minimize(f, 1, &cfg).unwrap();
        let b = minimize(f, 1, &cfg).unwrap();
        assert_eq!(a.best_params, b.best_params);
        assert_eq!(a.trace, b.trace);
    }
}

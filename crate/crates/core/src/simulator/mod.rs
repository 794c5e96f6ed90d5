//! Statevector simulation of the two alternating-operator ansätze.
//!
//! * `XMixer`: uniform superposition, then `p` rounds of
//!   `exp(-i beta sum X) exp(-i gamma H_C)`.
//! * `XyRing`: all time steps parked at the depot, then `p` rounds of the XY
//!   ring mixer (one independent ring per time step) after `exp(-i gamma H_C)`.
//!
//! Qubit `q = (t - 1) * N + i` holds `x[i][t]`; basis index bit `q` is qubit `q`.

mod state;
mod subspace;
mod xy;

pub use state::{SampleSet, Statevector, MAX_QUBITS};
pub use subspace::{OneHotState, MAX_SUBSPACE_DIM};
pub use xy::{BlockUnitary, RingMixer, MAX_BLOCK_QUBITS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{IsingHamiltonian, VarLayout};
use state::sample_distribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixerKind {
    /// Standard QAOA: transverse-field mixer over the whole register.
    XMixer,
    /// Constraint-preserving XY ring mixer per time step.
    XyRing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzConfig {
    pub kind: MixerKind,
    /// Number of alternating layers `p`.
    pub layers: usize,
    pub layout: VarLayout,
}

impl AnsatzConfig {
    pub fn new(kind: MixerKind, layers: usize, layout: VarLayout) -> Self {
        Self {
            kind,
            layers,
            layout,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.n_vars()
    }

    fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::Parameter("ansatz needs at least one layer".into()));
        }
        if self.layout.t_steps < 2 || self.layout.n_locations == 0 {
            return Err(Error::Parameter(
                "register layout needs T >= 2 and N >= 1".into(),
            ));
        }
        if self.kind == MixerKind::XyRing && self.layout.n_locations > MAX_BLOCK_QUBITS {
            return Err(Error::Guard(format!(
                "XY ring blocks limited to {MAX_BLOCK_QUBITS} qubits"
            )));
        }
        Ok(())
    }
}

/// Variational angles, one `(gamma, beta)` pair per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl Params {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::DimensionMismatch {
                expected: gammas.len(),
                actual: betas.len(),
            });
        }
        Ok(Self { gammas, betas })
    }

    pub fn constant(layers: usize, value: f64) -> Self {
        Self {
            gammas: vec![value; layers],
            betas: vec![value; layers],
        }
    }

    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    /// `[gamma_1..gamma_p, beta_1..beta_p]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() % 2 != 0 {
            return Err(Error::Parameter(
                "flat parameter vector must have even length".into(),
            ));
        }
        let p = flat.len() / 2;
        Ok(Self {
            gammas: flat[..p].to_vec(),
            betas: flat[p..].to_vec(),
        })
    }
}

/// Index of the register state with every time step at the depot.
pub fn parked_index(layout: VarLayout) -> u64 {
    (1..layout.t_steps).fold(0u64, |acc, t| acc | (1 << layout.index(0, t)))
}

pub fn prepare_initial_state(config: &AnsatzConfig) -> Result<Statevector> {
    config.validate()?;
    match config.kind {
        MixerKind::XMixer => Statevector::uniform(config.n_qubits()),
        MixerKind::XyRing => Statevector::basis(config.n_qubits(), parked_index(config.layout)),
    }
}

fn check_dims(state: &Statevector, h_c: &IsingHamiltonian) -> Result<()> {
    if state.n_qubits() != h_c.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.n_qubits(),
            actual: h_c.n_qubits(),
        });
    }
    Ok(())
}

/// `exp(-i gamma H_C)`.
pub fn apply_phase_separator(
    state: &mut Statevector,
    gamma: f64,
    h_c: &IsingHamiltonian,
) -> Result<()> {
    check_dims(state, h_c)?;
    state.apply_diagonal_phase(gamma, &h_c.diagonal())
}

pub fn apply_x_mixer(state: &mut Statevector, beta: f64) {
    state.apply_x_mixer(beta);
}

/// `exp(-i beta H_ring)` on every time-step block.
pub fn apply_xy_ring_mixer(
    state: &mut Statevector,
    beta: f64,
    config: &AnsatzConfig,
) -> Result<()> {
    config.validate()?;
    let mixer = RingMixer::new(config.layout.n_locations);
    apply_xy_ring_mixer_with(state, beta, config.layout, &mixer)
}

pub fn apply_xy_ring_mixer_with(
    state: &mut Statevector,
    beta: f64,
    layout: VarLayout,
    mixer: &RingMixer,
) -> Result<()> {
    let steps: Vec<usize> = (1..layout.t_steps).collect();
    apply_xy_blocks(state, beta, layout, mixer, &steps)
}

/// Ring mixer on the listed time steps only, in the given order.
pub fn apply_xy_blocks(
    state: &mut Statevector,
    beta: f64,
    layout: VarLayout,
    mixer: &RingMixer,
    steps: &[usize],
) -> Result<()> {
    if state.n_qubits() != layout.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: layout.n_vars(),
            actual: state.n_qubits(),
        });
    }
    subspace::check_mixer(layout, mixer)?;
    if beta == 0.0 {
        return Ok(());
    }
    let u = mixer.unitary(beta);
    for &t in steps {
        if !(1..layout.t_steps).contains(&t) {
            return Err(Error::Parameter(format!(
                "time step {t} outside 1..{}",
                layout.t_steps
            )));
        }
        mixer.apply_block(state.amplitudes_mut(), layout.index(0, t), &u);
    }
    Ok(())
}

pub fn run_ansatz(
    config: &AnsatzConfig,
    h_c: &IsingHamiltonian,
    params: &Params,
) -> Result<Statevector> {
    match Ansatz::full(*config, h_c)?.prepare(params)? {
        PreparedState::Full(s) => Ok(s),
        PreparedState::OneHot(s) => s.to_full(),
    }
}

/// `<psi| H_C |psi>`.
pub fn expectation(state: &Statevector, h_c: &IsingHamiltonian) -> Result<f64> {
    check_dims(state, h_c)?;
    state.expectation_diagonal(&h_c.diagonal())
}

pub fn sample(state: &Statevector, shots: u64, seed: u64) -> Result<SampleSet> {
    state.sample(shots, seed)
}

/// Probability outside the states with exactly one location per time step.
pub fn one_hot_leakage(state: &Statevector, layout: VarLayout) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|&(x, _)| !is_one_hot(x as u64, layout))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

pub fn is_one_hot(x: u64, layout: VarLayout) -> bool {
    let n = layout.n_locations;
    let block = (1u64 << n) - 1;
    (1..layout.t_steps).all(|t| ((x >> layout.index(0, t)) & block).count_ones() == 1)
}

/// Output of an ansatz circuit on either backend.
#[derive(Debug, Clone)]
pub enum PreparedState {
    Full(Statevector),
    OneHot(OneHotState),
}

impl PreparedState {
    pub fn to_full(&self) -> Result<Statevector> {
        match self {
            PreparedState::Full(s) => Ok(s.clone()),
            PreparedState::OneHot(s) => s.to_full(),
        }
    }
}

enum Backend {
    Full {
        diag: Vec<f64>,
        mixer: Option<RingMixer>,
    },
    OneHot {
        diag: Vec<f64>,
        mixer: RingMixer,
    },
}

/// A circuit family with its cost diagonal precomputed, for repeated evaluation.
pub struct Ansatz {
    config: AnsatzConfig,
    backend: Backend,
}

impl Ansatz {
    /// Simulates the whole `2^(N (T-1))` register.
    pub fn full(config: AnsatzConfig, h_c: &IsingHamiltonian) -> Result<Self> {
        config.validate()?;
        if h_c.n_qubits() != config.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: config.n_qubits(),
                actual: h_c.n_qubits(),
            });
        }
        if config.n_qubits() > MAX_QUBITS {
            return Err(Error::Guard(format!(
                "{} qubits exceeds the {MAX_QUBITS}-qubit statevector limit",
                config.n_qubits()
            )));
        }
        let mixer = match config.kind {
            MixerKind::XMixer => None,
            MixerKind::XyRing => Some(RingMixer::new(config.layout.n_locations)),
        };
        Ok(Self {
            config,
            backend: Backend::Full {
                diag: h_c.diagonal(),
                mixer,
            },
        })
    }

    /// Simulates only the one-hot subspace; XY ring ansatz only.
    pub fn one_hot(config: AnsatzConfig, h_c: &IsingHamiltonian) -> Result<Self> {
        config.validate()?;
        if config.kind != MixerKind::XyRing {
            return Err(Error::Parameter(
                "the one-hot subspace is only invariant under the XY ring mixer".into(),
            ));
        }
        if h_c.n_qubits() != config.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: config.n_qubits(),
                actual: h_c.n_qubits(),
            });
        }
        Ok(Self {
            config,
            backend: Backend::OneHot {
                diag: subspace::subspace_diagonal(config.layout, h_c)?,
                mixer: RingMixer::new(config.layout.n_locations),
            },
        })
    }

    /// Subspace backend for the XY ansatz, full register otherwise.
    pub fn for_pricing(config: AnsatzConfig, h_c: &IsingHamiltonian) -> Result<Self> {
        match config.kind {
            MixerKind::XyRing => Self::one_hot(config, h_c),
            MixerKind::XMixer => Self::full(config, h_c),
        }
    }

    pub fn config(&self) -> &AnsatzConfig {
        &self.config
    }

    pub fn prepare(&self, params: &Params) -> Result<PreparedState> {
        if params.layers() != self.config.layers {
            return Err(Error::DimensionMismatch {
                expected: self.config.layers,
                actual: params.layers(),
            });
        }
        let layout = self.config.layout;
        match &self.backend {
            Backend::Full { diag, mixer } => {
                let mut s = prepare_initial_state(&self.config)?;
                for (&g, &b) in params.gammas.iter().zip(&params.betas) {
                    s.apply_diagonal_phase(g, diag)?;
                    match mixer {
                        None => s.apply_x_mixer(b),
                        Some(m) => apply_xy_ring_mixer_with(&mut s, b, layout, m)?,
                    }
                }
                Ok(PreparedState::Full(s))
            }
            Backend::OneHot { diag, mixer } => {
                let mut s = OneHotState::parked(layout, 0)?;
                for (&g, &b) in params.gammas.iter().zip(&params.betas) {
                    s.apply_diagonal_phase(g, diag);
                    if b != 0.0 {
                        s.apply_ring(&mixer.unitary(b));
                    }
                }
                Ok(PreparedState::OneHot(s))
            }
        }
    }

    pub fn expectation_of(&self, state: &PreparedState) -> f64 {
        let (probs, diag) = match (state, &self.backend) {
            (PreparedState::Full(s), Backend::Full { diag, .. }) => (s.probabilities(), diag),
            (PreparedState::OneHot(s), Backend::OneHot { diag, .. }) => (s.probabilities(), diag),
            _ => unreachable!("state produced by a different backend"),
        };
        probs.iter().zip(diag).map(|(p, e)| p * e).sum()
    }

    pub fn expectation(&self, params: &Params) -> Result<f64> {
        let s = self.prepare(params)?;
        Ok(self.expectation_of(&s))
    }

    pub fn sample_state(&self, state: &PreparedState, shots: u64, seed: u64) -> Result<SampleSet> {
        let n_qubits = self.config.n_qubits();
        match state {
            PreparedState::Full(s) => s.sample(shots, seed),
            PreparedState::OneHot(s) => {
                let layout = s.layout();
                sample_distribution(
                    &s.probabilities(),
                    |k| subspace::full_index(layout, k),
                    n_qubits,
                    shots,
                    seed,
                )
            }
        }
    }

    pub fn sample(&self, params: &Params, shots: u64, seed: u64) -> Result<SampleSet> {
        let s = self.prepare(params)?;
        self.sample_state(&s, shots, seed)
    }

    /// Mean sampled energy over `shots` measurements.
    pub fn sampled_energy(&self, params: &Params, shots: u64, seed: u64) -> Result<f64> {
        let samples = self.sample(params, shots, seed)?;
        let total: f64 = samples
            .iter()
            .map(|(x, c)| c as f64 * self.energy_of_index(x))
            .sum();
        Ok(total / shots as f64)
    }

    fn energy_of_index(&self, x: u64) -> f64 {
        match &self.backend {
            Backend::Full { diag, .. } => diag[x as usize],
            Backend::OneHot { diag, .. } => {
                let layout = self.config.layout;
                let n = layout.n_locations;
                let mut k = 0usize;
                let mut stride = 1usize;
                for t in 1..layout.t_steps {
                    let block = (x >> layout.index(0, t)) & ((1u64 << n) - 1);
                    k += block.trailing_zeros() as usize * stride;
                    stride *= n;
                }
                diag[k]
            }
        }
    }
}

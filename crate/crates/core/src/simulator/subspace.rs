//! Simulation restricted to the per-step one-hot subspace.
//!
//! A state that starts with exactly one location per time step stays there
//! under the diagonal phase separator and the XY ring mixer, so the
//! `N^(T-1)` one-hot amplitudes carry the full state. Index
//! `k = sum_t loc_t * N^(t-1)`.

use num_complex::Complex64;

use super::xy::{BlockUnitary, RingMixer};
use crate::error::{Error, Result};
use crate::qubo::{IsingHamiltonian, VarLayout};

/// Largest subspace handled (about 16 M amplitudes).
pub const MAX_SUBSPACE_DIM: usize = 1 << 24;

#[derive(Debug, Clone)]
pub struct OneHotState {
    layout: VarLayout,
    amps: Vec<Complex64>,
}

impl OneHotState {
    pub fn dimension(layout: VarLayout) -> Result<usize> {
        let n = layout.n_locations;
        let slots = layout.t_steps - 1;
        let mut dim = 1usize;
        for _ in 0..slots {
            dim = dim
                .checked_mul(n)
                .filter(|&d| d <= MAX_SUBSPACE_DIM)
                .ok_or_else(|| Error::Guard(format!("one-hot subspace {n}^{slots} too large")))?;
        }
        Ok(dim)
    }

    /// All steps at `location`.
    pub fn parked(layout: VarLayout, location: usize) -> Result<Self> {
        let dim = Self::dimension(layout)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        let mut k = 0;
        let mut stride = 1;
        for _ in 1..layout.t_steps {
            k += location * stride;
            stride *= layout.n_locations;
        }
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> VarLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Full-register basis index of subspace index `k`.
    pub fn full_index(&self, k: usize) -> u64 {
        full_index(self.layout, k)
    }

    pub fn apply_diagonal_phase(&mut self, gamma: f64, diag: &[f64]) {
        if gamma == 0.0 {
            return;
        }
        for (a, &e) in self.amps.iter_mut().zip(diag) {
            *a *= Complex64::cis(-gamma * e);
        }
    }

    /// Applies the weight-one block of `u` to every time step.
    pub fn apply_ring(&mut self, u: &BlockUnitary) {
        let n = self.layout.n_locations;
        let mat = u.one_hot_sector();
        let dim = self.amps.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut stride = 1;
        for _ in 1..self.layout.t_steps {
            let block = stride * n;
            for hi in (0..dim).step_by(block) {
                for lo in 0..stride {
                    let base = hi + lo;
                    for (i, b) in buf.iter_mut().enumerate() {
                        *b = self.amps[base + i * stride];
                    }
                    for r in 0..n {
                        let row = &mat[r * n..(r + 1) * n];
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (m, a) in row.iter().zip(&buf) {
                            acc += m * a;
                        }
                        self.amps[base + r * stride] = acc;
                    }
                }
            }
            stride = block;
        }
    }

    /// Embeds into the full `2^(N (T-1))` register.
    pub fn to_full(&self) -> Result<super::Statevector> {
        let n_qubits = self.layout.n_vars();
        let mut sv = super::Statevector::zero(n_qubits)?;
        let amps = sv.amplitudes_mut();
        amps[0] = Complex64::new(0.0, 0.0);
        for (k, &a) in self.amps.iter().enumerate() {
            amps[self.full_index(k) as usize] = a;
        }
        Ok(sv)
    }
}

pub(crate) fn full_index(layout: VarLayout, mut k: usize) -> u64 {
    let n = layout.n_locations;
    let mut idx = 0u64;
    for t in 1..layout.t_steps {
        let loc = k % n;
        k /= n;
        idx |= 1 << layout.index(loc, t);
    }
    idx
}

/// Ising energies of every one-hot basis state.
pub(crate) fn subspace_diagonal(layout: VarLayout, h_c: &IsingHamiltonian) -> Result<Vec<f64>> {
    let dim = OneHotState::dimension(layout)?;
    Ok((0..dim)
        .map(|k| h_c.energy_index(full_index(layout, k)))
        .collect())
}

pub(crate) fn check_mixer(layout: VarLayout, mixer: &RingMixer) -> Result<()> {
    if mixer.block_qubits() != layout.n_locations {
        return Err(Error::DimensionMismatch {
            expected: layout.n_locations,
            actual: mixer.block_qubits(),
        });
    }
    Ok(())
}

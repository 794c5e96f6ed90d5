use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Register size limit (2^24 amplitudes, 256 MiB).
pub const MAX_QUBITS: usize = 24;

/// Dense `2^n` amplitude vector. Basis index bit `q` is the value of qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: u64) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index as usize >= dim {
            return Err(Error::Parameter(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            n_qubits,
            amps: vec![a; dim],
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_size(n_qubits)?;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies amplitude `x` by `exp(-i gamma diag[x])`.
    pub fn apply_diagonal_phase(&mut self, gamma: f64, diag: &[f64]) -> Result<()> {
        if diag.len() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                actual: diag.len(),
            });
        }
        if gamma == 0.0 {
            return Ok(());
        }
        for (a, &e) in self.amps.iter_mut().zip(diag) {
            *a *= Complex64::cis(-gamma * e);
        }
        Ok(())
    }

    /// `exp(-i beta sum_q X_q)`, one `Rx(2 beta)` per qubit.
    pub fn apply_x_mixer(&mut self, beta: f64) {
        if beta == 0.0 {
            return;
        }
        let c = beta.cos();
        let ms = Complex64::new(0.0, -beta.sin());
        for q in 0..self.n_qubits {
            let stride = 1usize << q;
            for base in (0..self.amps.len()).step_by(stride << 1) {
                for k in base..base + stride {
                    let a0 = self.amps[k];
                    let a1 = self.amps[k + stride];
                    self.amps[k] = a0 * c + a1 * ms;
                    self.amps[k + stride] = a0 * ms + a1 * c;
                }
            }
        }
    }

    /// `sum_x |a_x|^2 diag[x]`.
    pub fn expectation_diagonal(&self, diag: &[f64]) -> Result<f64> {
        if diag.len() != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                actual: diag.len(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(diag)
            .map(|(a, &e)| a.norm_sqr() * e)
            .sum())
    }

    pub fn sample(&self, shots: u64, seed: u64) -> Result<SampleSet> {
        let probs = self.probabilities();
        sample_distribution(&probs, |i| i as u64, self.n_qubits, shots, seed)
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::Guard(format!(
            "{n_qubits} qubits exceeds the {MAX_QUBITS}-qubit statevector limit"
        )));
    }
    Ok(())
}

/// Measurement outcomes keyed by full-register basis index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleSet {
    pub n_qubits: usize,
    pub shots: u64,
    pub counts: BTreeMap<u64, u64>,
}

impl SampleSet {
    /// Bitstring with character `q` equal to qubit `q` (most significant qubit last).
    pub fn bitstring(&self, index: u64) -> String {
        (0..self.n_qubits)
            .map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }
}

/// Multinomial draw: one uniform `f64` from ChaCha8 (seeded with `seed`) per
/// shot, located in the cumulative distribution by binary search.
pub(crate) fn sample_distribution(
    probs: &[f64],
    to_index: impl Fn(usize) -> u64,
    n_qubits: usize,
    shots: u64,
    seed: u64,
) -> Result<SampleSet> {
    if shots == 0 {
        return Err(Error::Parameter("shots must be >= 1".into()));
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let mut k = cdf.partition_point(|&c| c <= u);
        if k >= probs.len() {
            k = probs.len() - 1;
        }
        // Skip zero-probability entries that share a cumulative value.
        while probs[k] == 0.0 && k + 1 < probs.len() {
            k += 1;
        }
        *counts.entry(to_index(k)).or_insert(0) += 1;
    }
    Ok(SampleSet {
        n_qubits,
        shots,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn x_mixer_identity_at_zero() {
        let mut s = Statevector::uniform(3).unwrap();
        s.amplitudes_mut()[1] = Complex64::new(0.1, 0.3);
        let before = s.clone();
        s.apply_x_mixer(0.0);
        assert_eq!(s, before);
    }

    #[test]
    fn x_mixer_half_pi_flips() {
        let mut s = Statevector::zero(1).unwrap();
        s.apply_x_mixer(FRAC_PI_2);
        let a = s.amplitudes();
        assert!(a[0].norm() < 1e-15);
        assert!((a[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn basis_state_sampling_is_deterministic() {
        let s = Statevector::basis(4, 9).unwrap();
        let set = s.sample(1000, 3).unwrap();
        assert_eq!(set.counts.len(), 1);
        assert_eq!(set.counts[&9], 1000);
        assert_eq!(set.bitstring(9), "1001");
    }

    #[test]
    fn uniform_qubit_binomial_bound() {
        let s = Statevector::uniform(1).unwrap();
        let shots = 1_000_000u64;
        let set = s.sample(shots, 12345).unwrap();
        let ones = *set.counts.get(&1).unwrap_or(&0) as f64;
        let sigma = (shots as f64 * 0.25).sqrt();
        assert!((ones - 500_000.0).abs() < 5.0 * sigma);
        assert_eq!(set.counts.values().sum::<u64>(), shots);
    }

    #[test]
    fn sampling_reproducible() {
        let mut s = Statevector::uniform(3).unwrap();
        s.apply_x_mixer(0.2);
        assert_eq!(s.sample(500, 7).unwrap(), s.sample(500, 7).unwrap());
    }

    #[test]
    fn size_guard() {
        assert!(matches!(Statevector::zero(25), Err(Error::Guard(_))));
    }

    #[test]
    fn zero_shots_rejected() {
        assert!(Statevector::zero(1).unwrap().sample(0, 1).is_err());
    }
}

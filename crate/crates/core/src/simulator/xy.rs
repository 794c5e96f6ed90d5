//! Exact evolution under the XY ring Hamiltonian of one time-step block
//!
//! ```text
//! H = 1/2 sum_i (X_i X_{i+1 mod N} + Y_i Y_{i+1 mod N})
//! ```
//!
//! Each term swaps `|01>` and `|10>` on its edge, so `H` commutes with the
//! Hamming weight. It is diagonalised once per weight sector and
//! `exp(-i beta H)` is assembled per `beta` from the eigenpairs.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Upper bound on block size: a `2^N`-dimensional block operator.
pub const MAX_BLOCK_QUBITS: usize = 12;

const CACHE_LIMIT: usize = 256;

#[derive(Debug)]
struct Sector {
    /// Local basis states of this Hamming weight, ascending.
    states: Vec<usize>,
    eigvals: Vec<f64>,
    eigvecs: DMatrix<f64>,
}

/// Block unitary for one `beta`, stored per weight sector (row-major).
#[derive(Debug)]
pub struct BlockUnitary {
    sectors: Vec<(Vec<usize>, Vec<Complex64>)>,
}

impl BlockUnitary {
    /// The weight-one sector; row/column `i` is the state with only qubit `i` set.
    pub(crate) fn one_hot_sector(&self) -> &[Complex64] {
        &self.sectors[1].1
    }

    /// Dense `2^N x 2^N` matrix (row-major), for inspection and tests.
    pub fn to_dense(&self, block_qubits: usize) -> Vec<Complex64> {
        let dim = 1usize << block_qubits;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (states, u) in &self.sectors {
            let k = states.len();
            for (r, &sr) in states.iter().enumerate() {
                for (c, &sc) in states.iter().enumerate() {
                    m[sr * dim + sc] = u[r * k + c];
                }
            }
        }
        m
    }
}

/// XY ring mixer for blocks of `N` qubits, with a per-`beta` unitary cache.
#[derive(Debug)]
pub struct RingMixer {
    block_qubits: usize,
    sectors: Vec<Sector>,
    cache: Mutex<HashMap<u64, Arc<BlockUnitary>>>,
}

impl RingMixer {
    pub fn new(block_qubits: usize) -> Self {
        assert!(
            (1..=MAX_BLOCK_QUBITS).contains(&block_qubits),
            "ring block must have 1..={MAX_BLOCK_QUBITS} qubits"
        );
        let n = block_qubits;
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let sectors = (0..=n)
            .map(|w| {
                let states: Vec<usize> = (0..1usize << n)
                    .filter(|s| s.count_ones() as usize == w)
                    .collect();
                let pos: HashMap<usize, usize> =
                    states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
                let k = states.len();
                let mut h = DMatrix::<f64>::zeros(k, k);
                for (col, &s) in states.iter().enumerate() {
                    for &(a, b) in &edges {
                        if a == b {
                            // (XX + YY) / 2 on a single qubit is the identity.
                            h[(col, col)] += 1.0;
                            continue;
                        }
                        let ba = (s >> a) & 1;
                        let bb = (s >> b) & 1;
                        if ba != bb {
                            let t = s ^ (1 << a) ^ (1 << b);
                            h[(pos[&t], col)] += 1.0;
                        }
                    }
                }
                let eig = SymmetricEigen::new(h);
                Sector {
                    states,
                    eigvals: eig.eigenvalues.iter().copied().collect(),
                    eigvecs: eig.eigenvectors,
                }
            })
            .collect();
        Self {
            block_qubits,
            sectors,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn block_qubits(&self) -> usize {
        self.block_qubits
    }

    /// `exp(-i beta H)`, cached by the exact bit pattern of `beta`.
    pub fn unitary(&self, beta: f64) -> Arc<BlockUnitary> {
        let key = beta.to_bits();
        if let Some(u) = self.cache.lock().expect("mixer cache poisoned").get(&key) {
            return Arc::clone(u);
        }
        let u = Arc::new(self.build_unitary(beta));
        let mut cache = self.cache.lock().expect("mixer cache poisoned");
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, Arc::clone(&u));
        u
    }

    fn build_unitary(&self, beta: f64) -> BlockUnitary {
        let sectors = self
            .sectors
            .iter()
            .map(|sec| {
                let k = sec.states.len();
                let phases: Vec<Complex64> = sec
                    .eigvals
                    .iter()
                    .map(|&l| Complex64::cis(-beta * l))
                    .collect();
                let v = &sec.eigvecs;
                let mut u = vec![Complex64::new(0.0, 0.0); k * k];
                for r in 0..k {
                    for c in 0..k {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (m, ph) in phases.iter().enumerate() {
                            acc += ph * (v[(r, m)] * v[(c, m)]);
                        }
                        u[r * k + c] = acc;
                    }
                }
                (sec.states.clone(), u)
            })
            .collect();
        BlockUnitary { sectors }
    }

    /// Applies the block unitary to qubits `[offset, offset + N)` of `amps`.
    pub(crate) fn apply_block(&self, amps: &mut [Complex64], offset: usize, u: &BlockUnitary) {
        let n = self.block_qubits;
        let dim = amps.len();
        let low = 1usize << offset;
        let high_step = low << n;
        let mut gathered = Vec::new();
        for hi in (0..dim).step_by(high_step) {
            for lo in 0..low {
                let base = hi | lo;
                for (states, mat) in &u.sectors {
                    let k = states.len();
                    if k == 1 {
                        let idx = base | (states[0] << offset);
                        amps[idx] *= mat[0];
                        continue;
                    }
                    gathered.clear();
                    gathered.extend(states.iter().map(|&s| amps[base | (s << offset)]));
                    if gathered.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                        continue;
                    }
                    for (r, &s) in states.iter().enumerate() {
                        let row = &mat[r * k..(r + 1) * k];
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (m, a) in row.iter().zip(&gathered) {
                            acc += m * a;
                        }
                        amps[base | (s << offset)] = acc;
                    }
                }
            }
        }
    }
}

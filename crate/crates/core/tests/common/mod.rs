//! Reference implementations for the integration tests. Nothing here calls
//! the library's fast paths.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

use qcvrp::master::Route;
use qcvrp::Instance;

// ---------------------------------------------------------------- dense quantum

/// Row-major dense complex matrix.
#[derive(Clone, Debug)]
pub struct Dense {
    pub dim: usize,
    pub m: Vec<C>,
}

fn pauli(p: char) -> [C; 4] {
    let o = C::new(0.0, 0.0);
    let l = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    match p {
        'I' => [l, o, o, l],
        'X' => [o, l, l, o],
        'Y' => [o, -i, i, o],
        'Z' => [l, o, o, -l],
        _ => panic!("unknown Pauli {p}"),
    }
}

impl Dense {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            m: vec![C::new(0.0, 0.0); dim * dim],
        }
    }

    fn kron(&self, b: &[C; 4]) -> Self {
        let d = self.dim * 2;
        let mut out = Self::zeros(d);
        for r in 0..self.dim {
            for c in 0..self.dim {
                let a = self.m[r * self.dim + c];
                for br in 0..2 {
                    for bc in 0..2 {
                        out.m[(2 * r + br) * d + 2 * c + bc] = a * b[br * 2 + bc];
                    }
                }
            }
        }
        out
    }

    /// Tensor product of single-qubit Paulis; qubit `q` is bit `q` of the basis index.
    pub fn pauli_string(n: usize, ops: &[(usize, char)]) -> Self {
        let mut m = Self {
            dim: 1,
            m: vec![C::new(1.0, 0.0)],
        };
        for q in (0..n).rev() {
            let p = ops.iter().find(|o| o.0 == q).map_or('I', |o| o.1);
            m = m.kron(&pauli(p));
        }
        m
    }

    pub fn add_scaled(&mut self, other: &Dense, k: f64) {
        for (a, b) in self.m.iter_mut().zip(&other.m) {
            *a += b * k;
        }
    }

    pub fn matvec(&self, v: &[C]) -> Vec<C> {
        (0..self.dim)
            .map(|r| {
                self.m[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn max_row_sum(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                self.m[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .map(|a| a.norm())
                    .sum()
            })
            .fold(0.0, f64::max)
    }

    /// `exp(-i t H) v` by a Taylor series on short sub-steps.
    pub fn evolve(&self, t: f64, v: &[C]) -> Vec<C> {
        let norm = self.max_row_sum() * t.abs();
        let steps = (norm / 0.25).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let mut psi = v.to_vec();
        for _ in 0..steps {
            let mut term = psi.clone();
            let mut acc = psi.clone();
            for k in 1..60 {
                let hv = self.matvec(&term);
                let f = C::new(0.0, -dt) / k as f64;
                term = hv.into_iter().map(|x| x * f).collect();
                let size: f64 = term.iter().map(|x| x.norm()).sum();
                for (a, b) in acc.iter_mut().zip(&term) {
                    *a += b;
                }
                if size < 1e-18 {
                    break;
                }
            }
            psi = acc;
        }
        psi
    }
}

/// `c I + sum h_q Z_q + sum J Z_a Z_b`.
pub fn dense_ising(h: &[f64], couplings: &[(usize, usize, f64)], constant: f64) -> Dense {
    let n = h.len();
    let mut out = Dense::pauli_string(n, &[]);
    for a in out.m.iter_mut() {
        *a *= constant;
    }
    for (q, &hq) in h.iter().enumerate() {
        out.add_scaled(&Dense::pauli_string(n, &[(q, 'Z')]), hq);
    }
    for &(a, b, j) in couplings {
        out.add_scaled(&Dense::pauli_string(n, &[(a, 'Z'), (b, 'Z')]), j);
    }
    out
}

pub fn dense_x_mixer(n: usize) -> Dense {
    let mut out = Dense::zeros(1 << n);
    for q in 0..n {
        out.add_scaled(&Dense::pauli_string(n, &[(q, 'X')]), 1.0);
    }
    out
}

/// `1/2 sum (X_a X_b + Y_a Y_b)` over ring edges inside every time-step block.
pub fn dense_xy_ring(n_locations: usize, t_steps: usize) -> Dense {
    let nq = n_locations * (t_steps - 1);
    let mut out = Dense::zeros(1 << nq);
    for t in 0..t_steps - 1 {
        for i in 0..n_locations {
            let a = t * n_locations + i;
            let b = t * n_locations + (i + 1) % n_locations;
            if a == b {
                out.add_scaled(&Dense::pauli_string(nq, &[]), 1.0);
                continue;
            }
            out.add_scaled(&Dense::pauli_string(nq, &[(a, 'X'), (b, 'X')]), 0.5);
            out.add_scaled(&Dense::pauli_string(nq, &[(a, 'Y'), (b, 'Y')]), 0.5);
        }
    }
    out
}

pub fn max_amp_diff(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------- pricing objective

/// The relaxed pricing objective written out literally over `x[i][t]`,
/// `t = 0..T`, with `x[.][0]` given explicitly.
pub fn literal_objective(
    inst: &Instance,
    duals: &[f64],
    t_steps: usize,
    lambda1: f64,
    lambda2: f64,
    x: &[Vec<bool>],
) -> f64 {
    let n = inst.n_locations();
    let xv = |i: usize, t: usize| if x[i][t] { 1.0 } else { 0.0 };
    let mut travel = 0.0;
    for i in 0..n {
        for j in 0..n {
            for t in 0..t_steps {
                travel += inst.dist(i, j) * xv(i, t) * xv(j, (t + 1) % t_steps);
            }
        }
    }
    let mut profit = 0.0;
    for t in 0..t_steps {
        for i in 0..n {
            profit += xv(i, t) * duals[i];
        }
    }
    let mut load = 0.0;
    for t in 0..t_steps {
        for i in 0..n {
            load += inst.demand(i) as f64 * xv(i, t);
        }
    }
    let w = inst.capacity() as f64;
    let cap = lambda1 * (load - w) + lambda1 * (load - w) * (load - w);
    let mut slot = 0.0;
    for t in 0..t_steps {
        let s: f64 = (0..n).map(|i| xv(i, t)).sum();
        for i in 0..n {
            slot += xv(i, t) * (s - 1.0);
        }
    }
    travel - profit + cap + lambda2 * slot
}

/// `sum_{t >= 1} (sum_i x[i][t] - 1)^2`.
pub fn literal_onehot_violation(n: usize, t_steps: usize, x: &[Vec<bool>]) -> f64 {
    (1..t_steps)
        .map(|t| {
            let s = (0..n).filter(|&i| x[i][t]).count() as f64;
            (s - 1.0) * (s - 1.0)
        })
        .sum()
}

/// Expands register index `bits` (qubit `(t-1) N + i`) into `x[i][t]` with the depot at `t = 0`.
pub fn expand_bits(n: usize, t_steps: usize, bits: u64) -> Vec<Vec<bool>> {
    let mut x = vec![vec![false; t_steps]; n];
    x[0][0] = true;
    for t in 1..t_steps {
        for (i, row) in x.iter_mut().enumerate() {
            row[t] = (bits >> ((t - 1) * n + i)) & 1 == 1;
        }
    }
    x
}

// ---------------------------------------------------------------- master problem

/// `min c x` s.t. `A x >= 1`, `x >= 0` by enumerating basic solutions.
pub fn vertex_lp(a: &[Vec<f64>], c: &[f64]) -> Option<f64> {
    let m = a.len();
    let n = c.len();
    // Constraint k < m is row k of A x = 1; k >= m is x_{k-m} = 0.
    let total = m + n;
    let mut best: Option<f64> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    if n > total {
        return None;
    }
    loop {
        let mut mat = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);
        for (r, &k) in pick.iter().enumerate() {
            if k < m {
                for j in 0..n {
                    mat[(r, j)] = a[k][j];
                }
                rhs[r] = 1.0;
            } else {
                mat[(r, k - m)] = 1.0;
            }
        }
        if let Some(x) = mat.clone().lu().solve(&rhs) {
            let residual = (&mat * &x - &rhs).norm();
            let feasible = residual < 1e-9
                && x.iter().all(|&v| v >= -1e-9)
                && a.iter().all(|row| {
                    row.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() >= 1.0 - 1e-9
                });
            if feasible {
                let obj: f64 = c.iter().zip(x.iter()).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // Next combination.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < total - n + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

pub fn covering_matrix(inst: &Instance, routes: &[Route]) -> Vec<Vec<f64>> {
    inst.customers()
        .map(|c| {
            routes
                .iter()
                .map(|r| if r.covers(c) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Cheapest exact partition of the customers by a subset of `routes`, by trying every subset.
pub fn brute_force_partition(inst: &Instance, routes: &[Route]) -> Option<f64> {
    let all: u64 = inst.customers().fold(0, |m, c| m | (1 << c));
    let mut best: Option<f64> = None;
    for s in 0u64..(1 << routes.len()) {
        let mut mask = 0u64;
        let mut cost = 0.0;
        let mut ok = true;
        for (k, r) in routes.iter().enumerate() {
            if s >> k & 1 == 1 {
                if mask & r.mask() != 0 {
                    ok = false;
                    break;
                }
                mask |= r.mask();
                cost += r.distance();
            }
        }
        if ok && mask == all {
            best = Some(best.map_or(cost, |b: f64| b.min(cost)));
        }
    }
    best
}

/// Shortest closed tour through `customers` from the depot, by trying every order.
pub fn best_order_length(inst: &Instance, customers: &[usize]) -> f64 {
    fn rec(inst: &Instance, last: usize, left: &mut Vec<usize>, acc: f64, best: &mut f64) {
        if left.is_empty() {
            *best = best.min(acc + inst.dist(last, 0));
            return;
        }
        for k in 0..left.len() {
            let c = left.remove(k);
            rec(inst, c, left, acc + inst.dist(last, c), best);
            left.insert(k, c);
        }
    }
    let mut best = f64::INFINITY;
    rec(inst, 0, &mut customers.to_vec(), 0.0, &mut best);
    if customers.is_empty() {
        0.0
    } else {
        best
    }
}

/// Every capacity-feasible nonempty customer subset, as a bitmask.
pub fn feasible_subsets(inst: &Instance) -> Vec<u64> {
    let n = inst.n_customers();
    (1u64..(1 << n))
        .map(|s| s << 1)
        .filter(|s| {
            let load: u32 = inst
                .customers()
                .filter(|&c| s >> c & 1 == 1)
                .map(|c| inst.demand(c))
                .sum();
            load <= inst.capacity()
        })
        .collect()
}

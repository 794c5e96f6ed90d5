//! Pricing subproblem as a QUBO and as an Ising cost Hamiltonian.
//!
//! Variables are `x[i][t]` for every location `i` and time step `t` in
//! `1..T`; the depot start at `t = 0` is fixed and folded into linear terms
//! and the offset. Qubit `q = (t - 1) * N + i`.
//!
//! Capacity and at-most-one-per-step constraints are relaxed with linear plus
//! quadratic multiplier terms (no slack variables). The one-location-per-step
//! equality is left to the mixer, or to [`add_onehot_penalty`] for the
//! plain X-mixer baseline.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::master::DualSolution;

/// Everything needed to build one pricing QUBO.
#[derive(Debug, Clone, Copy)]
pub struct SubproblemSpec<'a> {
    pub instance: &'a Instance,
    pub duals: &'a DualSolution,
    /// Number of time steps `T` (the depot start included).
    pub t_steps: usize,
    /// Capacity multiplier.
    pub lambda1: f64,
    /// At-most-one-location-per-step multiplier.
    pub lambda2: f64,
    /// One-hot penalty weight for the X-mixer baseline.
    pub lambda3: f64,
}

impl<'a> SubproblemSpec<'a> {
    pub fn new(instance: &'a Instance, duals: &'a DualSolution, t_steps: usize) -> Self {
        Self {
            instance,
            duals,
            t_steps,
            lambda1: 1.0,
            lambda2: 1.0,
            lambda3: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t_steps < 2 {
            return Err(Error::Parameter(format!(
                "T must be >= 2, got {}",
                self.t_steps
            )));
        }
        for (name, v) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if self.duals.len() != self.instance.n_locations() {
            return Err(Error::DimensionMismatch {
                expected: self.instance.n_locations(),
                actual: self.duals.len(),
            });
        }
        Ok(())
    }
}

/// Maps `(location, step)` with `step` in `1..T` to a qubit index and back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VarLayout {
    pub n_locations: usize,
    pub t_steps: usize,
}

impl VarLayout {
    pub fn n_vars(&self) -> usize {
        self.n_locations * (self.t_steps - 1)
    }

    #[inline]
    pub fn index(&self, location: usize, step: usize) -> usize {
        debug_assert!(step >= 1 && step < self.t_steps && location < self.n_locations);
        (step - 1) * self.n_locations + location
    }

    #[inline]
    pub fn location_step(&self, q: usize) -> (usize, usize) {
        (q % self.n_locations, q / self.n_locations + 1)
    }
}

/// `offset + sum_a linear[a] x_a + sum_{a<b} quadratic[(a,b)] x_a x_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    pub layout: VarLayout,
    pub linear: Vec<f64>,
    /// Keys satisfy `a < b`; diagonal terms live in `linear`.
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl QuboProblem {
    fn zero(layout: VarLayout) -> Self {
        Self {
            linear: vec![0.0; layout.n_vars()],
            quadratic: BTreeMap::new(),
            offset: 0.0,
            layout,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.linear.len()
    }

    fn add_quad(&mut self, a: usize, b: usize, c: f64) {
        if c == 0.0 {
            return;
        }
        if a == b {
            self.linear[a] += c;
        } else {
            *self.quadratic.entry((a.min(b), a.max(b))).or_insert(0.0) += c;
        }
    }

    pub fn evaluate(&self, bits: &[bool]) -> Result<f64> {
        if bits.len() != self.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars(),
                actual: bits.len(),
            });
        }
        let mut e = self.offset;
        for (a, &c) in self.linear.iter().enumerate() {
            if bits[a] {
                e += c;
            }
        }
        for (&(a, b), &c) in &self.quadratic {
            if bits[a] && bits[b] {
                e += c;
            }
        }
        Ok(e)
    }

    /// Energy of the basis state whose bit `q` is `x_q`.
    pub fn evaluate_index(&self, x: u64) -> f64 {
        let bit = |q: usize| (x >> q) & 1 == 1;
        let mut e = self.offset;
        for (a, &c) in self.linear.iter().enumerate() {
            if bit(a) {
                e += c;
            }
        }
        for (&(a, b), &c) in &self.quadratic {
            if bit(a) && bit(b) {
                e += c;
            }
        }
        e
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            kind: &'static str,
            n_vars: usize,
            n_locations: usize,
            t_steps: usize,
            offset: f64,
            linear: &'a [f64],
            quadratic: Vec<(usize, usize, f64)>,
        }
        serde_json::to_string_pretty(&Doc {
            kind: "qubo",
            n_vars: self.n_vars(),
            n_locations: self.layout.n_locations,
            t_steps: self.layout.t_steps,
            offset: self.offset,
            linear: &self.linear,
            quadratic: self
                .quadratic
                .iter()
                .map(|(&(a, b), &c)| (a, b, c))
                .collect(),
        })
        .expect("qubo serializes")
    }
}

/// Builds the relaxed pricing objective for the given duals.
pub fn build_alim_qubo(spec: &SubproblemSpec<'_>) -> Result<QuboProblem> {
    spec.validate()?;
    let inst = spec.instance;
    let n = inst.n_locations();
    let t_steps = spec.t_steps;
    let layout = VarLayout {
        n_locations: n,
        t_steps,
    };
    let mut q = QuboProblem::zero(layout);
    let last = t_steps - 1;

    // Travel legs. Step 0 is pinned to the depot, so the 0 -> 1 leg and the
    // wrap-around (T-1) -> 0 leg are linear.
    for j in 0..n {
        q.linear[layout.index(j, 1)] += inst.dist(0, j);
        q.linear[layout.index(j, last)] += inst.dist(j, 0);
    }
    for t in 1..last {
        for i in 0..n {
            for j in 0..n {
                let d = inst.dist(i, j);
                q.add_quad(layout.index(i, t), layout.index(j, t + 1), d);
            }
        }
    }

    // Dual prices (the depot's is 0).
    for t in 1..t_steps {
        for i in 0..n {
            q.linear[layout.index(i, t)] -= spec.duals.get(i);
        }
    }

    // Capacity: l1 (L - W) + l1 (L - W)^2 with L = sum w_i x_it.
    let l1 = spec.lambda1;
    let w_cap = inst.capacity() as f64;
    let vars: Vec<(usize, f64)> = (1..t_steps)
        .flat_map(|t| (0..n).map(move |i| (i, t)))
        .map(|(i, t)| (layout.index(i, t), inst.demand(i) as f64))
        .filter(|&(_, w)| w != 0.0)
        .collect();
    q.offset += l1 * (w_cap * w_cap - w_cap);
    for (k, &(a, wa)) in vars.iter().enumerate() {
        q.linear[a] += l1 * (wa - 2.0 * w_cap * wa + wa * wa);
        for &(b, wb) in &vars[k + 1..] {
            q.add_quad(a, b, 2.0 * l1 * wa * wb);
        }
    }

    // At most one location per step: l2 * S_t (S_t - 1) = 2 l2 sum_{i<j} x_it x_jt.
    let l2 = spec.lambda2;
    for t in 1..t_steps {
        for i in 0..n {
            for j in i + 1..n {
                q.add_quad(layout.index(i, t), layout.index(j, t), 2.0 * l2);
            }
        }
    }
    Ok(q)
}

/// Adds `lambda3 * sum_{t>=1} (sum_i x_it - 1)^2`.
pub fn add_onehot_penalty(qubo: &QuboProblem, spec: &SubproblemSpec<'_>) -> QuboProblem {
    let mut q = qubo.clone();
    let l3 = spec.lambda3;
    let layout = q.layout;
    let n = layout.n_locations;
    for t in 1..layout.t_steps {
        q.offset += l3;
        for i in 0..n {
            q.linear[layout.index(i, t)] -= l3;
            for j in i + 1..n {
                q.add_quad(layout.index(i, t), layout.index(j, t), 2.0 * l3);
            }
        }
    }
    q
}

/// `constant + sum_q h[q] z_q + sum J_ab z_a z_b` with `z = 1 - 2x`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingHamiltonian {
    pub h: Vec<f64>,
    /// `(a, b, J_ab)` with `a < b`, sorted.
    pub couplings: Vec<(usize, usize, f64)>,
    pub constant: f64,
}

impl IsingHamiltonian {
    pub fn n_qubits(&self) -> usize {
        self.h.len()
    }

    /// Energy of the basis state with bit `q` of `x` equal to `x_q`.
    pub fn energy_index(&self, x: u64) -> f64 {
        let z = |q: usize| if (x >> q) & 1 == 1 { -1.0 } else { 1.0 };
        let mut e = self.constant;
        for (q, &hq) in self.h.iter().enumerate() {
            e += hq * z(q);
        }
        for &(a, b, j) in &self.couplings {
            e += j * z(a) * z(b);
        }
        e
    }

    /// Energy for explicit spins `z_q in {+1, -1}`.
    pub fn energy_spins(&self, z: &[i8]) -> Result<f64> {
        if z.len() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                actual: z.len(),
            });
        }
        let mut e = self.constant;
        for (q, &hq) in self.h.iter().enumerate() {
            e += hq * z[q] as f64;
        }
        for &(a, b, j) in &self.couplings {
            e += j * (z[a] * z[b]) as f64;
        }
        Ok(e)
    }

    /// Diagonal of the Hamiltonian over all `2^n` basis states.
    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.n_qubits();
        let mut diag = vec![0.0; 1 << n];
        diag[0] = self.constant
            + self.h.iter().sum::<f64>()
            + self.couplings.iter().map(|c| c.2).sum::<f64>();
        // Neighbour lists of lower-indexed qubits for the incremental update.
        let mut lower: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut upper_sum = vec![0.0; n];
        for &(a, b, j) in &self.couplings {
            lower[b].push((a, j));
            upper_sum[a] += j;
        }
        for q in 0..n {
            let base = 1usize << q;
            for x in 0..base {
                // Flip z_q from +1 to -1; all higher bits are 0 (z = +1).
                let mut delta = -2.0 * (self.h[q] + upper_sum[q]);
                for &(a, j) in &lower[q] {
                    let za = if (x >> a) & 1 == 1 { -1.0 } else { 1.0 };
                    delta -= 2.0 * j * za;
                }
                diag[base | x] = diag[x] + delta;
            }
        }
        diag
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            kind: &'static str,
            n_qubits: usize,
            constant: f64,
            h: &'a [f64],
            couplings: &'a [(usize, usize, f64)],
        }
        serde_json::to_string_pretty(&Doc {
            kind: "ising",
            n_qubits: self.n_qubits(),
            constant: self.constant,
            h: &self.h,
            couplings: &self.couplings,
        })
        .expect("ising serializes")
    }
}

/// Exact substitution `x = (1 - z) / 2`.
pub fn qubo_to_ising(qubo: &QuboProblem) -> IsingHamiltonian {
    let mut h = vec![0.0; qubo.n_vars()];
    let mut constant = qubo.offset;
    for (a, &c) in qubo.linear.iter().enumerate() {
        constant += c / 2.0;
        h[a] -= c / 2.0;
    }
    let mut couplings = Vec::with_capacity(qubo.quadratic.len());
    for (&(a, b), &c) in &qubo.quadratic {
        let quarter = c / 4.0;
        constant += quarter;
        h[a] -= quarter;
        h[b] -= quarter;
        couplings.push((a, b, quarter));
    }
    IsingHamiltonian {
        h,
        couplings,
        constant,
    }
}

/// Qubit budgets of the two constraint encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QubitCounts {
    /// Multiplier encoding, `N * T`.
    pub alim: usize,
    /// Slack-variable encoding, `N * (T + 1) + ceil(log2 W) - 1`.
    pub slack: usize,
}

pub fn qubit_counts(instance: &Instance, t_steps: usize) -> Result<QubitCounts> {
    if t_steps < 2 {
        return Err(Error::Parameter(format!("T must be >= 2, got {t_steps}")));
    }
    let n = instance.n_locations();
    let cap_bits = ceil_log2(instance.capacity());
    Ok(QubitCounts {
        alim: n * t_steps,
        slack: n * (t_steps + 1) + cap_bits - 1,
    })
}

fn ceil_log2(w: u32) -> usize {
    (32 - (w.max(1) - 1).leading_zeros()) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_instance;

    fn two_customer() -> Instance {
        Instance::new(vec![(0.5, 0.5), (0.2, 0.9), (0.8, 0.1)], vec![0, 7, 11], 25).unwrap()
    }

    #[test]
    fn all_zero_energy_is_capacity_offset() {
        let inst = generate_instance(5, 4, 25, 1, 15).unwrap();
        let duals = DualSolution::from_customer_duals(&[0.3, 0.2, 0.5, 0.1]);
        let q = build_alim_qubo(&SubproblemSpec::new(&inst, &duals, 4)).unwrap();
        assert_eq!(q.n_vars(), 15);
        assert!((q.offset - 600.0).abs() < 1e-12);
        assert!((q.evaluate(&vec![false; 15]).unwrap() - 600.0).abs() < 1e-12);
    }

    #[test]
    fn parked_vehicle_costs_only_capacity_term() {
        let inst = generate_instance(5, 4, 25, 1, 15).unwrap();
        let duals = DualSolution::from_customer_duals(&[0.3, 0.2, 0.5, 0.1]);
        let spec = SubproblemSpec::new(&inst, &duals, 4);
        let q = build_alim_qubo(&spec).unwrap();
        let mut bits = vec![false; q.n_vars()];
        for t in 1..4 {
            bits[q.layout.index(0, t)] = true;
        }
        assert!((q.evaluate(&bits).unwrap() - 600.0).abs() < 1e-12);
    }

    #[test]
    fn single_visit_hand_expansion() {
        let inst = two_customer();
        let duals = DualSolution::from_customer_duals(&[0.9, 0.4]);
        let spec = SubproblemSpec::new(&inst, &duals, 2);
        let q = build_alim_qubo(&spec).unwrap();
        // x[1][1] = 1 only.
        let bits = vec![false, true, false];
        let w1 = 7.0;
        let expected = inst.dist(0, 1) + inst.dist(1, 0) - 0.9 + (w1 - 25.0) + (w1 - 25.0).powi(2);
        assert!((q.evaluate(&bits).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn onehot_penalty_contributions() {
        let inst = two_customer();
        let duals = DualSolution::zeros(&inst);
        let mut spec = SubproblemSpec::new(&inst, &duals, 3);
        spec.lambda3 = 2.5;
        let base = build_alim_qubo(&spec).unwrap();
        let pen = add_onehot_penalty(&base, &spec);
        let diff = |bits: &[bool]| pen.evaluate(bits).unwrap() - base.evaluate(bits).unwrap();
        // One-hot feasible: slot 1 at customer 2, slot 2 at depot.
        let mut ok = vec![false; 6];
        ok[base.layout.index(2, 1)] = true;
        ok[base.layout.index(0, 2)] = true;
        assert!(diff(&ok).abs() < 1e-12);
        // Two locations in slot 1.
        let mut two = ok.clone();
        two[base.layout.index(1, 1)] = true;
        assert!((diff(&two) - 2.5).abs() < 1e-12);
        // Empty slot 2.
        let mut empty = ok.clone();
        empty[base.layout.index(0, 2)] = false;
        assert!((diff(&empty) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn ising_of_single_linear_term() {
        let layout = VarLayout {
            n_locations: 1,
            t_steps: 2,
        };
        let mut q = QuboProblem::zero(layout);
        q.linear[0] = 3.0;
        let h = qubo_to_ising(&q);
        assert_eq!(h.h, vec![-1.5]);
        assert_eq!(h.constant, 1.5);
    }

    #[test]
    fn ising_of_single_product() {
        let layout = VarLayout {
            n_locations: 2,
            t_steps: 2,
        };
        let mut q = QuboProblem::zero(layout);
        q.add_quad(0, 1, 1.0);
        let h = qubo_to_ising(&q);
        assert_eq!(h.couplings, vec![(0, 1, 0.25)]);
        assert_eq!(h.h, vec![-0.25, -0.25]);
        assert_eq!(h.constant, 0.25);
    }

    #[test]
    fn diagonal_matches_pointwise_energy() {
        let inst = generate_instance(8, 2, 25, 1, 15).unwrap();
        let duals = DualSolution::from_customer_duals(&[0.7, 0.2]);
        let q = build_alim_qubo(&SubproblemSpec::new(&inst, &duals, 3)).unwrap();
        let h = qubo_to_ising(&q);
        let diag = h.diagonal();
        for (x, &e) in diag.iter().enumerate() {
            assert!((e - h.energy_index(x as u64)).abs() < 1e-9);
        }
    }

    #[test]
    fn length_mismatch() {
        let inst = two_customer();
        let duals = DualSolution::zeros(&inst);
        let q = build_alim_qubo(&SubproblemSpec::new(&inst, &duals, 2)).unwrap();
        assert!(matches!(
            q.evaluate(&[true]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn t_below_two_rejected() {
        let inst = two_customer();
        let duals = DualSolution::zeros(&inst);
        assert!(build_alim_qubo(&SubproblemSpec::new(&inst, &duals, 1)).is_err());
    }

    #[test]
    fn qubit_accounting() {
        let n5 = generate_instance(1, 4, 25, 1, 15).unwrap();
        assert_eq!(
            qubit_counts(&n5, 4).unwrap(),
            QubitCounts {
                alim: 20,
                slack: 29
            }
        );
        let n6 = generate_instance(1, 5, 25, 1, 15).unwrap();
        assert_eq!(
            qubit_counts(&n6, 4).unwrap(),
            QubitCounts {
                alim: 24,
                slack: 34
            }
        );
        let w1 = Instance::new(vec![(0.5, 0.5), (0.1, 0.1)], vec![0, 1], 1).unwrap();
        assert_eq!(qubit_counts(&w1, 3).unwrap().slack, 2 * 4 - 1);
        assert_eq!(ceil_log2(32), 5);
        assert_eq!(ceil_log2(33), 6);
    }
}

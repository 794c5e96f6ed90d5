//! Dense two-phase primal simplex for covering programs
//!
//! ```text
//! min  c^T x   s.t.  A x >= b,  x >= 0,  b >= 0
//! ```
//!
//! Bland's rule is used for both the entering and the leaving variable, so the
//! method terminates on degenerate problems and the returned basis depends only
//! on the column order.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CoveringSolution {
    pub x: Vec<f64>,
    /// Row multipliers of the `>=` constraints.
    pub y: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug)]
pub(crate) enum LpOutcome {
    Optimal(CoveringSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `(rows + 1) x (cols + 1)`; the last row holds reduced costs, the last column the RHS.
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    #[inline]
    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let inv = 1.0 / self.at(pr, pc);
        for c in 0..w {
            *self.at_mut(pr, c) *= inv;
        }
        *self.at_mut(pr, pc) = 1.0;
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let f = self.at(r, pc);
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.at(pr, c);
                if v != 0.0 {
                    *self.at_mut(r, c) -= f * v;
                }
            }
            *self.at_mut(r, pc) = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Runs Bland's-rule iterations over columns `< limit`. Returns false if unbounded.
    fn optimize(&mut self, limit: usize, tol: f64) -> Result<bool> {
        let max_iters = 50_000 + 100 * (self.rows + self.cols);
        for _ in 0..max_iters {
            let obj = self.rows;
            let Some(enter) = (0..limit).find(|&c| self.at(obj, c) < -tol) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, enter);
                if a > tol {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - tol
                                || (ratio <= lratio + tol && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Ok(false),
            }
        }
        Err(Error::Internal("simplex iteration limit reached".into()))
    }
}

/// Solves the covering program. `a` is row-major `m x n`.
pub(crate) fn solve_covering(a: &[Vec<f64>], b: &[f64], c: &[f64], tol: f64) -> Result<LpOutcome> {
    let m = b.len();
    let n = c.len();
    if a.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::Internal("covering matrix shape mismatch".into()));
    }
    if b.iter().any(|&v| v < 0.0) {
        return Err(Error::Internal(
            "covering right-hand side must be nonnegative".into(),
        ));
    }
    if m == 0 {
        // Every column has nonnegative cost in our use; negative costs would be unbounded.
        if c.iter().any(|&v| v < -tol) {
            return Ok(LpOutcome::Unbounded);
        }
        return Ok(LpOutcome::Optimal(CoveringSolution {
            x: vec![0.0; n],
            y: Vec::new(),
            objective: 0.0,
        }));
    }

    // Columns: structural [0, n), surplus [n, n + m), artificial [n + m, n + 2m).
    let cols = n + 2 * m;
    let mut t = Tableau {
        rows: m,
        cols,
        data: vec![0.0; (m + 1) * (cols + 1)],
        basis: (n + m..n + 2 * m).collect(),
    };
    for r in 0..m {
        for j in 0..n {
            *t.at_mut(r, j) = a[r][j];
        }
        *t.at_mut(r, n + r) = -1.0;
        *t.at_mut(r, n + m + r) = 1.0;
        *t.at_mut(r, cols) = b[r];
    }

    // Phase 1: minimize the sum of artificials.
    for j in 0..=cols {
        let mut s = 0.0;
        if (n + m..n + 2 * m).contains(&j) {
            s += 1.0;
        }
        for r in 0..m {
            s -= t.at(r, j);
        }
        *t.at_mut(m, j) = s;
    }
    if !t.optimize(n + m, tol)? {
        return Err(Error::Internal("phase one reported unbounded".into()));
    }
    if -t.rhs(m) > tol.max(1e-9) * (1.0 + b.iter().sum::<f64>()) {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive zero-level artificials out of the basis.
    for r in 0..m {
        if t.basis[r] >= n + m {
            if let Some(j) = (0..n + m).find(|&j| t.at(r, j).abs() > tol) {
                t.pivot(r, j);
            }
        }
    }

    // Phase 2 reduced costs.
    let cost = |j: usize| if j < n { c[j] } else { 0.0 };
    for j in 0..=cols {
        let mut s = if j < cols { cost(j) } else { 0.0 };
        for r in 0..m {
            let bj = t.basis[r];
            let cb = if bj < n + m { cost(bj) } else { 0.0 };
            s -= cb * t.at(r, j);
        }
        *t.at_mut(m, j) = s;
    }
    if !t.optimize(n + m, tol)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let y: Vec<f64> = (0..m).map(|i| t.at(m, n + i)).collect();
    let objective = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpOutcome::Optimal(CoveringSolution { x, y, objective }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> CoveringSolution {
        match solve_covering(a, b, c, 1e-9).unwrap() {
            LpOutcome::Optimal(s) => s,
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn identity_cover() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let s = optimal(&a, &[1.0, 1.0], &[2.0, 3.0]);
        assert!((s.objective - 5.0).abs() < 1e-12);
        assert!((s.y[0] - 2.0).abs() < 1e-12 && (s.y[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn fractional_triangle_cover() {
        // Three customers, three pair routes of cost 1: optimum 1.5 at x = 1/2.
        let a = vec![
            vec![1.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
        ];
        let s = optimal(&a, &[1.0; 3], &[1.0; 3]);
        assert!((s.objective - 1.5).abs() < 1e-12);
        assert!(s.x.iter().all(|&v| (v - 0.5).abs() < 1e-12));
        assert!((s.y.iter().sum::<f64>() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn uncovered_row_is_infeasible() {
        let a = vec![vec![1.0], vec![0.0]];
        assert!(matches!(
            solve_covering(&a, &[1.0, 1.0], &[1.0], 1e-9).unwrap(),
            LpOutcome::Infeasible
        ));
    }

    #[test]
    fn empty_program() {
        let s = optimal(&[], &[], &[]);
        assert_eq!(s.objective, 0.0);
    }
}

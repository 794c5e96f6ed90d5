//! Restricted master problem over a route pool.
//!
//! The LP relaxation uses `>= 1` covering rows and yields the customer duals
//! that drive pricing. The integer problem uses `= 1` partitioning rows and
//! gives the final routing plan.

mod integer;
mod route;
pub(crate) mod simplex;

pub use integer::solve_rmp_integer;
pub use route::{tour_length, Route, RouteSet, MAX_LOCATIONS};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use simplex::{solve_covering, LpOutcome};

/// Pivoting and feasibility tolerance for the master LP.
#[derive(Debug, Clone, Copy)]
pub struct LpConfig {
    pub tol: f64,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self { tol: 1e-9 }
    }
}

/// Nonnegative prices on the customer covering rows.
///
/// Indexed by location; the depot entry is always 0 so pricing can sum over
/// every location uniformly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSolution {
    values: Vec<f64>,
}

impl DualSolution {
    /// `customer_duals[k]` is the price of customer `k + 1`.
    pub fn from_customer_duals(customer_duals: &[f64]) -> Self {
        let mut values = Vec::with_capacity(customer_duals.len() + 1);
        values.push(0.0);
        values.extend_from_slice(customer_duals);
        Self { values }
    }

    pub fn zeros(instance: &Instance) -> Self {
        Self {
            values: vec![0.0; instance.n_locations()],
        }
    }

    /// Price of location `i` (0 for the depot).
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// All prices, depot first.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn objective(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `d_r - sum_i a_ri y_i`.
    pub fn reduced_cost(&self, route: &Route) -> f64 {
        route.distance()
            - route
                .customers()
                .iter()
                .map(|&c| self.values[c])
                .sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub struct RmpLpSolution {
    /// One value per route of the pool, in pool order.
    pub x: Vec<f64>,
    pub objective: f64,
    pub duals: DualSolution,
}

#[derive(Debug, Clone)]
pub struct RmpIntSolution {
    /// Indices into the route pool that was solved (or into the enumerated routes for the oracle).
    pub selected: Vec<usize>,
    pub routes: Vec<Route>,
    pub objective: f64,
}

/// One out-and-back route per customer.
pub fn initial_route_set(instance: &Instance) -> RouteSet {
    instance
        .customers()
        .map(|c| Route::new(instance, &[c]).expect("single demand never exceeds capacity"))
        .collect()
}

pub(crate) fn check_coverage(routes: &RouteSet, instance: &Instance) -> Result<()> {
    let covered = routes.iter().fold(0u64, |m, r| m | r.mask());
    if let Some(c) = instance.customers().find(|&c| covered & (1 << c) == 0) {
        return Err(Error::Infeasible(format!(
            "customer {c} is not covered by any route"
        )));
    }
    Ok(())
}

fn covering_matrix(routes: &[&Route], rows: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|&c| {
            routes
                .iter()
                .map(|r| if r.covers(c) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect()
}

/// LP relaxation of the master problem with its optimal duals.
pub fn solve_rmp_lp(routes: &RouteSet, instance: &Instance) -> Result<RmpLpSolution> {
    solve_rmp_lp_with(routes, instance, LpConfig::default())
}

pub fn solve_rmp_lp_with(
    routes: &RouteSet,
    instance: &Instance,
    config: LpConfig,
) -> Result<RmpLpSolution> {
    check_coverage(routes, instance)?;
    let cols: Vec<&Route> = routes.iter().collect();
    let rows: Vec<usize> = instance.customers().collect();
    let a = covering_matrix(&cols, &rows);
    let b = vec![1.0; rows.len()];
    let c: Vec<f64> = cols.iter().map(|r| r.distance()).collect();
    match solve_covering(&a, &b, &c, config.tol)? {
        LpOutcome::Optimal(sol) => {
            let y: Vec<f64> = sol.y.iter().map(|&v| v.max(0.0)).collect();
            Ok(RmpLpSolution {
                x: sol.x,
                objective: sol.objective,
                duals: DualSolution::from_customer_duals(&y),
            })
        }
        LpOutcome::Infeasible => Err(Error::Infeasible("master LP has no feasible cover".into())),
        LpOutcome::Unbounded => Err(Error::Internal("master LP unbounded".into())),
    }
}

/// LP bound for the customers in `rows` using only `cols`; `None` if they cannot be covered.
pub(crate) fn covering_bound(cols: &[&Route], rows: &[usize], tol: f64) -> Result<Option<f64>> {
    let a = covering_matrix(cols, rows);
    let b = vec![1.0; rows.len()];
    let c: Vec<f64> = cols.iter().map(|r| r.distance()).collect();
    match solve_covering(&a, &b, &c, tol)? {
        LpOutcome::Optimal(sol) => Ok(Some(sol.objective)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Internal("covering bound unbounded".into())),
    }
}

//! Brute-force references: complete route enumeration, exact pricing and the
//! exact CVRP optimum. Only meant for desk-scale instances.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::master::{tour_length, DualSolution, RmpIntSolution, Route};

/// Largest instance (locations, depot included) accepted by [`enumerate_routes`].
pub const MAX_ENUM_LOCATIONS: usize = 10;
/// Largest instance accepted by [`exact_cvrp`].
pub const MAX_CVRP_LOCATIONS: usize = 8;

/// Every capacity-feasible customer subset, each in its shortest visiting order.
#[derive(Debug, Clone)]
pub struct EnumeratedRoutes {
    routes: Vec<Route>,
}

impl EnumeratedRoutes {
    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    /// Routes with at most `max_customers` stops, ranked by reduced cost
    /// (ties: fewer customers, then lexicographic order).
    pub fn ranked_by_reduced_cost(
        &self,
        duals: &DualSolution,
        max_customers: usize,
    ) -> Vec<(Route, f64)> {
        let mut ranked: Vec<(Route, f64)> = self
            .routes
            .iter()
            .filter(|r| r.len() <= max_customers)
            .map(|r| (r.clone(), duals.reduced_cost(r)))
            .collect();
        ranked.sort_by(|a, b| pricing_order(&a.0, a.1, &b.0, b.1));
        ranked
    }

    /// Minimum reduced cost over routes that fit in `t_steps` time steps,
    /// including the empty route at 0.
    pub fn min_reduced_cost(&self, duals: &DualSolution, t_steps: usize) -> (Route, f64) {
        let mut best = (Route::empty(), 0.0);
        for r in self.routes.iter().filter(|r| r.len() < t_steps) {
            let rc = duals.reduced_cost(r);
            if pricing_order(r, rc, &best.0, best.1).is_lt() {
                best = (r.clone(), rc);
            }
        }
        best
    }
}

pub(crate) fn pricing_order(a: &Route, ca: f64, b: &Route, cb: f64) -> std::cmp::Ordering {
    ca.total_cmp(&cb)
        .then(a.len().cmp(&b.len()))
        .then_with(|| a.customers().cmp(b.customers()))
}

fn guard(instance: &Instance, limit: usize) -> Result<()> {
    if instance.n_locations() > limit {
        return Err(Error::Guard(format!(
            "brute force limited to {limit} locations, instance has {}",
            instance.n_locations()
        )));
    }
    Ok(())
}

pub fn enumerate_routes(instance: &Instance) -> Result<EnumeratedRoutes> {
    guard(instance, MAX_ENUM_LOCATIONS)?;
    let n = instance.n_customers();
    let cap = instance.capacity();
    let mut routes = Vec::new();
    for subset in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n)
            .filter(|k| subset & (1 << k) != 0)
            .map(|k| k + 1)
            .collect();
        let load: u32 = members.iter().map(|&c| instance.demand(c)).sum();
        if load > cap {
            continue;
        }
        let order = shortest_order(instance, &members);
        routes.push(Route::new(instance, &order)?);
    }
    routes.sort_by(|a, b| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.customers().cmp(b.customers()))
    });
    Ok(EnumeratedRoutes { routes })
}

/// Exhaustive search over all orders of `members` (sorted ascending on input).
fn shortest_order(instance: &Instance, members: &[usize]) -> Vec<usize> {
    let mut perm = members.to_vec();
    let mut best = perm.clone();
    let mut best_len = tour_length(instance, &perm);
    while next_permutation(&mut perm) {
        let len = tour_length(instance, &perm);
        if len < best_len {
            best_len = len;
            best.copy_from_slice(&perm);
        }
    }
    best
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Exact pricing: the most negative reduced cost reachable with `t_steps` time steps.
pub fn exact_min_reduced_cost(
    instance: &Instance,
    duals: &DualSolution,
    t_steps: usize,
) -> Result<(Route, f64)> {
    Ok(enumerate_routes(instance)?.min_reduced_cost(duals, t_steps))
}

/// Optimal CVRP solution by dynamic programming over customer subsets.
pub fn exact_cvrp(instance: &Instance) -> Result<RmpIntSolution> {
    guard(instance, MAX_CVRP_LOCATIONS)?;
    let all = enumerate_routes(instance)?;
    exact_cvrp_from(instance, &all)
}

pub(crate) fn exact_cvrp_from(
    instance: &Instance,
    all: &EnumeratedRoutes,
) -> Result<RmpIntSolution> {
    let n = instance.n_customers();
    let full = (1usize << n) - 1;
    // Route masks in customer-bit space (bit k <-> customer k + 1).
    let masks: Vec<usize> = all
        .routes
        .iter()
        .map(|r| (r.mask() >> 1) as usize)
        .collect();
    let mut best = vec![f64::INFINITY; full + 1];
    let mut choice = vec![usize::MAX; full + 1];
    best[0] = 0.0;
    for set in 1..=full {
        let low = set & set.wrapping_neg();
        for (idx, &m) in masks.iter().enumerate() {
            if m & low != 0 && m & !set == 0 {
                let v = all.routes[idx].distance() + best[set & !m];
                if v < best[set] {
                    best[set] = v;
                    choice[set] = idx;
                }
            }
        }
    }
    if !best[full].is_finite() {
        return Err(Error::Infeasible("no feasible CVRP solution".into()));
    }
    let mut selected = Vec::new();
    let mut set = full;
    while set != 0 {
        let idx = choice[set];
        selected.push(idx);
        set &= !masks[idx];
    }
    selected.sort_unstable();
    Ok(RmpIntSolution {
        routes: selected.iter().map(|&i| all.routes[i].clone()).collect(),
        selected,
        objective: best[full],
    })
}

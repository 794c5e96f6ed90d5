use super::{check_coverage, covering_bound, LpConfig, RmpIntSolution, Route, RouteSet};
use crate::error::{Error, Result};
use crate::instance::Instance;

/// Pools up to this size are searched without LP bounding.
const EXHAUSTIVE_LIMIT: usize = 25;

/// Minimum-distance exact cover of the customers by routes of the pool.
///
/// Depth-first search that always branches on the lowest uncovered customer.
/// Pools larger than 25 routes prune with the covering LP over the remaining
/// customers and the still-compatible routes.
pub fn solve_rmp_integer(routes: &RouteSet, instance: &Instance) -> Result<RmpIntSolution> {
    check_coverage(routes, instance)?;
    let all: u64 = instance.customers().fold(0, |m, c| m | (1 << c));
    let mut search = Search {
        routes: routes.as_slice(),
        all,
        use_lp: routes.len() > EXHAUSTIVE_LIMIT,
        tol: LpConfig::default().tol,
        best: None,
        stack: Vec::new(),
    };
    search.dfs(0, 0.0)?;
    match search.best {
        Some((objective, mut selected)) => {
            selected.sort_unstable();
            Ok(RmpIntSolution {
                routes: selected
                    .iter()
                    .map(|&i| routes.as_slice()[i].clone())
                    .collect(),
                selected,
                objective,
            })
        }
        None => Err(Error::Infeasible(
            "no exact cover of the customers exists in the route pool".into(),
        )),
    }
}

struct Search<'a> {
    routes: &'a [Route],
    all: u64,
    use_lp: bool,
    tol: f64,
    best: Option<(f64, Vec<usize>)>,
    stack: Vec<usize>,
}

impl Search<'_> {
    fn incumbent(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.0)
    }

    fn dfs(&mut self, covered: u64, cost: f64) -> Result<()> {
        if covered == self.all {
            if cost < self.incumbent() - 1e-12 {
                self.best = Some((cost, self.stack.clone()));
            }
            return Ok(());
        }
        if cost >= self.incumbent() - 1e-12 {
            return Ok(());
        }
        let remaining = self.all & !covered;
        if self.use_lp {
            let cols: Vec<&Route> = self
                .routes
                .iter()
                .filter(|r| !r.is_empty() && r.mask() & covered == 0)
                .collect();
            let rows: Vec<usize> = (0..64).filter(|&c| remaining & (1 << c) != 0).collect();
            match covering_bound(&cols, &rows, self.tol)? {
                None => return Ok(()),
                Some(bound) if cost + bound >= self.incumbent() - 1e-12 => return Ok(()),
                Some(_) => {}
            }
        }
        let pivot = remaining.trailing_zeros();
        let mut candidates: Vec<usize> = (0..self.routes.len())
            .filter(|&i| {
                let m = self.routes[i].mask();
                m & (1 << pivot) != 0 && m & covered == 0
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            self.routes[a]
                .distance()
                .total_cmp(&self.routes[b].distance())
                .then(a.cmp(&b))
        });
        for i in candidates {
            self.stack.push(i);
            let r = &self.routes[i];
            self.dfs(covered | r.mask(), cost + r.distance())?;
            self.stack.pop();
        }
        Ok(())
    }
}

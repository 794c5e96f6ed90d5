use std::collections::HashMap;

use crate::instance::Instance;
use crate::master::{DualSolution, Route};
use crate::oracle::pricing_order;
use crate::qubo::VarLayout;
use crate::simulator::SampleSet;

/// Feasible routes recovered from measurement outcomes.
#[derive(Debug, Clone, Default)]
pub struct Decoded {
    /// Distinct routes with reduced cost, ascending (ties: fewer customers, then lexicographic).
    pub candidates: Vec<(Route, f64)>,
    /// Shots rejected for a one-hot, repeat-visit or capacity violation.
    pub infeasible_shots: u64,
    pub infeasible_distinct: usize,
}

/// Location occupied at each step `1..T`, or `None` if some step is not one-hot.
pub fn step_locations(x: u64, layout: VarLayout) -> Option<Vec<usize>> {
    let n = layout.n_locations;
    let mask = (1u64 << n) - 1;
    (1..layout.t_steps)
        .map(|t| {
            let block = (x >> layout.index(0, t)) & mask;
            (block.count_ones() == 1).then(|| block.trailing_zeros() as usize)
        })
        .collect()
}

/// Converts one basis state into a route, or `None` if it is infeasible.
///
/// Depot visits are dropped from the sequence, so a tour that returns to the
/// depot mid-way is priced as a single trip over its customers.
pub fn decode_bitstring(x: u64, instance: &Instance, t_steps: usize) -> Option<Route> {
    let layout = VarLayout {
        n_locations: instance.n_locations(),
        t_steps,
    };
    let locs = step_locations(x, layout)?;
    let customers: Vec<usize> = locs.into_iter().filter(|&l| l != 0).collect();
    // Route::new rejects repeats and capacity violations.
    Route::new(instance, &customers).ok()
}

pub fn decode_samples(
    samples: &SampleSet,
    instance: &Instance,
    t_steps: usize,
    duals: &DualSolution,
) -> Decoded {
    let mut out = Decoded::default();
    let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
    for (x, count) in samples.iter() {
        match decode_bitstring(x, instance, t_steps) {
            Some(route) => {
                if seen.insert(route.customers().to_vec(), ()).is_none() {
                    let rc = duals.reduced_cost(&route);
                    out.candidates.push((route, rc));
                }
            }
            None => {
                out.infeasible_shots += count;
                out.infeasible_distinct += 1;
            }
        }
    }
    out.candidates
        .sort_by(|a, b| pricing_order(&a.0, a.1, &b.0, b.1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn inst() -> Instance {
        Instance::new(
            vec![(0.5, 0.5), (0.1, 0.9), (0.8, 0.3), (0.3, 0.2)],
            vec![0, 10, 10, 10],
            25,
        )
        .unwrap()
    }

    fn layout(t: usize) -> VarLayout {
        VarLayout {
            n_locations: 4,
            t_steps: t,
        }
    }

    fn bits(locs: &[usize], t: usize) -> u64 {
        let l = layout(t);
        locs.iter()
            .enumerate()
            .fold(0, |acc, (k, &loc)| acc | (1 << l.index(loc, k + 1)))
    }

    fn samples(entries: &[(u64, u64)]) -> SampleSet {
        SampleSet {
            n_qubits: 12,
            shots: entries.iter().map(|e| e.1).sum(),
            counts: entries.iter().copied().collect::<BTreeMap<_, _>>(),
        }
    }

    #[test]
    fn all_depot_is_empty_route() {
        let i = inst();
        let duals = DualSolution::from_customer_duals(&[1.0, 1.0, 1.0]);
        let d = decode_samples(&samples(&[(bits(&[0, 0, 0], 4), 5)]), &i, 4, &duals);
        assert_eq!(d.candidates.len(), 1);
        assert!(d.candidates[0].0.is_empty());
        assert_eq!(d.candidates[0].1, 0.0);
    }

    #[test]
    fn single_customer_then_depot() {
        let i = inst();
        let duals = DualSolution::from_customer_duals(&[0.7, 0.0, 0.0]);
        let d = decode_samples(&samples(&[(bits(&[1, 0], 3), 3)]), &i, 3, &duals);
        let (route, rc) = &d.candidates[0];
        assert_eq!(route.customers(), &[1]);
        assert!((rc - (2.0 * i.dist(0, 1) - 0.7)).abs() < 1e-12);
    }

    #[test]
    fn double_occupancy_rejected() {
        let i = inst();
        let duals = DualSolution::zeros(&i);
        let x = bits(&[1, 0], 3) | (1 << layout(3).index(2, 1));
        let d = decode_samples(&samples(&[(x, 4)]), &i, 3, &duals);
        assert!(d.candidates.is_empty());
        assert_eq!(d.infeasible_shots, 4);
    }

    #[test]
    fn repeat_visit_and_overload_rejected() {
        let i = inst();
        let duals = DualSolution::zeros(&i);
        let repeat = bits(&[1, 0, 1], 4);
        let overload = bits(&[1, 2, 3], 4);
        let d = decode_samples(&samples(&[(repeat, 1), (overload, 2)]), &i, 4, &duals);
        assert!(d.candidates.is_empty());
        assert_eq!(d.infeasible_shots, 3);
        assert_eq!(d.infeasible_distinct, 2);
    }

    #[test]
    fn mid_route_depot_is_dropped_and_duplicates_merge() {
        let i = inst();
        let duals = DualSolution::from_customer_duals(&[1.0, 1.0, 0.0]);
        let a = bits(&[1, 0, 2], 4);
        let b = bits(&[2, 1, 0], 4);
        let d = decode_samples(&samples(&[(a, 1), (b, 1)]), &i, 4, &duals);
        assert_eq!(d.candidates.len(), 1);
        assert_eq!(d.candidates[0].0.customers(), &[1, 2]);
    }

    #[test]
    fn sorted_ascending() {
        let i = inst();
        let duals = DualSolution::from_customer_duals(&[2.0, 0.5, 3.0]);
        let s = samples(&[
            (bits(&[1, 0], 3), 1),
            (bits(&[2, 0], 3), 1),
            (bits(&[3, 0], 3), 1),
        ]);
        let d = decode_samples(&s, &i, 3, &duals);
        assert!(d.candidates.windows(2).all(|w| w[0].1 <= w[1].1));
    }
}

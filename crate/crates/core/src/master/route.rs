use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Largest instance whose customer sets fit in a [`Route`] coverage mask.
pub const MAX_LOCATIONS: usize = 64;

/// A single vehicle tour leaving and returning to the depot.
///
/// Stored in canonical direction: the lexicographically smaller of the visit
/// sequence and its reversal.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    customers: Vec<usize>,
    distance: f64,
    load: u32,
    mask: u64,
}

impl Route {
    pub fn new(instance: &Instance, customers: &[usize]) -> Result<Self> {
        let n = instance.n_locations();
        if n > MAX_LOCATIONS {
            return Err(Error::Guard(format!(
                "routes support at most {MAX_LOCATIONS} locations, instance has {n}"
            )));
        }
        let mut mask = 0u64;
        let mut load = 0u32;
        for &c in customers {
            if c == 0 || c >= n {
                return Err(Error::Parameter(format!(
                    "route customer {c} out of range 1..{n}"
                )));
            }
            if mask & (1 << c) != 0 {
                return Err(Error::Parameter(format!("customer {c} repeated in route")));
            }
            mask |= 1 << c;
            load += instance.demand(c);
        }
        if load > instance.capacity() {
            return Err(Error::Parameter(format!(
                "route load {load} exceeds capacity {}",
                instance.capacity()
            )));
        }
        let mut seq = customers.to_vec();
        let mut rev = seq.clone();
        rev.reverse();
        if rev < seq {
            seq = rev;
        }
        let distance = tour_length(instance, &seq);
        Ok(Self {
            customers: seq,
            distance,
            load,
            mask,
        })
    }

    /// The route that never leaves the depot.
    pub fn empty() -> Self {
        Self {
            customers: Vec::new(),
            distance: 0.0,
            load: 0,
            mask: 0,
        }
    }

    pub fn customers(&self) -> &[usize] {
        &self.customers
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn load(&self) -> u32 {
        self.load
    }

    /// Bit `i` set iff customer `i` is on the route.
    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn covers(&self, customer: usize) -> bool {
        customer < 64 && self.mask & (1 << customer) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.customers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.customers.len()
    }
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "0")?;
        for c in &self.customers {
            write!(f, "-{c}")?;
        }
        write!(f, "-0")
    }
}

/// Depot -> `seq` in order -> depot.
pub fn tour_length(instance: &Instance, seq: &[usize]) -> f64 {
    let mut prev = 0;
    let mut total = 0.0;
    for &c in seq {
        total += instance.dist(prev, c);
        prev = c;
    }
    total + instance.dist(prev, 0)
}

/// Ordered, duplicate-free collection of routes (the master problem's columns).
#[derive(Debug, Clone, Default)]
pub struct RouteSet {
    routes: Vec<Route>,
    seen: HashSet<Vec<usize>>,
}

impl RouteSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `route` unless an identical one is already present. Returns whether it was added.
    pub fn insert(&mut self, route: Route) -> bool {
        if self.seen.insert(route.customers.clone()) {
            self.routes.push(route);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, route: &Route) -> bool {
        self.seen.contains(&route.customers)
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Route> {
        self.routes.iter()
    }

    pub fn get(&self, idx: usize) -> Option<&Route> {
        self.routes.get(idx)
    }

    pub fn as_slice(&self) -> &[Route] {
        &self.routes
    }
}

impl FromIterator<Route> for RouteSet {
    fn from_iter<I: IntoIterator<Item = Route>>(iter: I) -> Self {
        let mut set = RouteSet::new();
        for r in iter {
            set.insert(r);
        }
        set
    }
}

impl<'a> IntoIterator for &'a RouteSet {
    type Item = &'a Route;
    type IntoIter = std::slice::Iter<'a, Route>;

    fn into_iter(self) -> Self::IntoIter {
        self.routes.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst() -> Instance {
        Instance::new(
            vec![(0.5, 0.5), (0.5, 1.0), (1.0, 0.5), (0.0, 0.0)],
            vec![0, 10, 10, 10],
            25,
        )
        .unwrap()
    }

    #[test]
    fn canonical_direction() {
        let i = inst();
        let a = Route::new(&i, &[3, 1]).unwrap();
        let b = Route::new(&i, &[1, 3]).unwrap();
        assert_eq!(a.customers(), &[1, 3]);
        assert_eq!(a, b);
        assert!((a.distance() - tour_length(&i, &[3, 1])).abs() < 1e-12);
    }

    #[test]
    fn distance_and_load() {
        let i = inst();
        let r = Route::new(&i, &[1]).unwrap();
        assert!((r.distance() - 1.0).abs() < 1e-12);
        assert_eq!(r.load(), 10);
        assert!(r.covers(1) && !r.covers(2));
        assert_eq!(r.to_string(), "0-1-0");
    }

    #[test]
    fn rejects_invalid_routes() {
        let i = inst();
        assert!(Route::new(&i, &[1, 1]).is_err());
        assert!(Route::new(&i, &[0, 1]).is_err());
        assert!(Route::new(&i, &[4]).is_err());
        assert!(Route::new(&i, &[1, 2, 3]).is_err());
    }

    #[test]
    fn route_set_deduplicates() {
        let i = inst();
        let mut set = RouteSet::new();
        assert!(set.insert(Route::new(&i, &[1, 2]).unwrap()));
        assert!(!set.insert(Route::new(&i, &[2, 1]).unwrap()));
        assert_eq!(set.len(), 1);
    }
}

//! CVRP instances: depot at index 0, customers at `1..n_locations`.
//!
//! The Euclidean distance matrix is always derived from the coordinates and
//! is never written to disk.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version written into (and required from) instance files.
pub const SCHEMA_VERSION: u32 = 1;

/// Depot coordinates of generated instances.
pub const DEPOT_COORD: (f64, f64) = (0.5, 0.5);

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    coords: Vec<(f64, f64)>,
    demands: Vec<u32>,
    capacity: u32,
    dist: Vec<f64>,
}

impl Instance {
    /// Builds a validated instance. `coords[0]` and `demands[0]` belong to the depot.
    pub fn new(coords: Vec<(f64, f64)>, demands: Vec<u32>, capacity: u32) -> Result<Self> {
        validate(&coords, &demands, capacity)?;
        let n = coords.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (xi, yi) = coords[i];
                    let (xj, yj) = coords[j];
                    dist[i * n + j] = (xi - xj).hypot(yi - yj);
                }
            }
        }
        Ok(Self {
            coords,
            demands,
            capacity,
            dist,
        })
    }

    /// Number of locations including the depot.
    pub fn n_locations(&self) -> usize {
        self.coords.len()
    }

    pub fn n_customers(&self) -> usize {
        self.coords.len() - 1
    }

    /// Customer indices `1..n_locations`.
    pub fn customers(&self) -> std::ops::Range<usize> {
        1..self.coords.len()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn demands(&self) -> &[u32] {
        &self.demands
    }

    pub fn demand(&self, i: usize) -> u32 {
        self.demands[i]
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.coords.len() + j]
    }

    pub fn total_demand(&self) -> u64 {
        self.demands.iter().map(|&w| w as u64).sum()
    }

    /// Returns a copy with customers relabelled: new customer `k` is old customer `perm[k - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.coords.len()];
        if perm.len() != self.n_customers()
            || perm
                .iter()
                .any(|&c| c == 0 || c >= self.coords.len() || std::mem::replace(&mut seen[c], true))
        {
            return Err(Error::Parameter(
                "relabel permutation must list every customer exactly once".into(),
            ));
        }
        let mut coords = vec![self.coords[0]];
        let mut demands = vec![0];
        for &c in perm {
            coords.push(self.coords[c]);
            demands.push(self.demands[c]);
        }
        Self::new(coords, demands, self.capacity)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = self.to_json();
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            schema_version: SCHEMA_VERSION,
            n_locations: self.coords.len(),
            capacity: self.capacity,
            coords: self.coords.iter().map(|&(x, y)| [x, y]).collect(),
            demands: self.demands.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("instance serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::schema(path, e.into_inner().to_string())
        })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::schema(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    file.schema_version
                ),
            ));
        }
        if file.coords.len() != file.n_locations {
            return Err(Error::schema(
                "coords",
                format!(
                    "{} entries but n_locations = {}",
                    file.coords.len(),
                    file.n_locations
                ),
            ));
        }
        if file.demands.len() != file.n_locations {
            return Err(Error::schema(
                "demands",
                format!(
                    "{} entries but n_locations = {}",
                    file.demands.len(),
                    file.n_locations
                ),
            ));
        }
        for (i, c) in file.coords.iter().enumerate() {
            for (axis, v) in ["x", "y"].iter().zip(c) {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::schema(
                        format!("coords[{i}].{axis}"),
                        format!("{v} outside [0, 1]"),
                    ));
                }
            }
        }
        let coords = file.coords.iter().map(|c| (c[0], c[1])).collect();
        Self::new(coords, file.demands, file.capacity)
    }
}

fn validate(coords: &[(f64, f64)], demands: &[u32], capacity: u32) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::schema(
            "n_locations",
            "at least the depot is required",
        ));
    }
    if coords.len() != demands.len() {
        return Err(Error::schema(
            "demands",
            format!("{} demands for {} locations", demands.len(), coords.len()),
        ));
    }
    if capacity == 0 {
        return Err(Error::schema("capacity", "must be at least 1"));
    }
    for (i, &(x, y)) in coords.iter().enumerate() {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::schema(
                format!("coords[{i}]"),
                "non-finite coordinate",
            ));
        }
    }
    if demands[0] != 0 {
        return Err(Error::schema("demands[0]", "depot demand must be 0"));
    }
    for (i, &w) in demands.iter().enumerate().skip(1) {
        if w == 0 {
            return Err(Error::schema(
                format!("demands[{i}]"),
                "customer demand must be >= 1",
            ));
        }
        if w > capacity {
            return Err(Error::schema(
                format!("demands[{i}]"),
                format!("demand {w} exceeds capacity {capacity}"),
            ));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    schema_version: u32,
    n_locations: usize,
    capacity: u32,
    coords: Vec<[f64; 2]>,
    demands: Vec<u32>,
}

/// Random instance with the depot at the centre of the unit square.
///
/// Uses ChaCha8 seeded from `seed`: two uniform `f64` draws per customer for
/// the coordinates, then one uniform integer draw per customer for the demand.
pub fn generate_instance(
    seed: u64,
    n_customers: usize,
    capacity: u32,
    demand_lo: u32,
    demand_hi: u32,
) -> Result<Instance> {
    if n_customers == 0 {
        return Err(Error::Parameter("n_customers must be >= 1".into()));
    }
    if demand_lo == 0 || demand_lo > demand_hi || demand_hi > capacity {
        return Err(Error::Parameter(format!(
            "need 1 <= demand_lo <= demand_hi <= capacity, got [{demand_lo}, {demand_hi}] with capacity {capacity}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(n_customers + 1);
    coords.push(DEPOT_COORD);
    for _ in 0..n_customers {
        let x: f64 = rng.gen();
        let y: f64 = rng.gen();
        coords.push((x, y));
    }
    let mut demands = Vec::with_capacity(n_customers + 1);
    demands.push(0);
    for _ in 0..n_customers {
        demands.push(rng.gen_range(demand_lo..=demand_hi));
    }
    Instance::new(coords, demands, capacity)
}

//! Column generation for the capacitated vehicle routing problem, with the
//! pricing subproblem solved by simulated QAOA-type circuits or by brute force.

pub mod cg;
pub mod error;
pub mod instance;
pub mod master;
pub mod optimizer;
pub mod oracle;
pub mod qubo;
pub mod simulator;

pub use error::{Error, Result};
pub use instance::{generate_instance, Instance};

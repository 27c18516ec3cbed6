//! Penalty-based QUBO encodings of bin packing and the traveling salesman
//! problem, an Ising bridge, and an exact QAOA statevector simulator.
//!
//! Inequality constraints are encoded either with binary slack registers
//! plus quadratic penalties, or directly with a truncated exponential
//! penalty that needs no auxiliary variables.

pub mod cli;
pub mod encoding;
pub mod error;
pub mod instance;
pub mod metrics;
pub mod ising;
pub mod poly;
pub mod qaoa;
pub mod qubo;
pub mod sweep;

pub use error::{Error, Result};

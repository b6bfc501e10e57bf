//! Desk-scale numerical laboratory for probabilistic number theory and
//! algorithmic information.
//!
//! * [`sieve`]: segmented sieve computing ω(n) and Ω(n) over contiguous ranges.
//! * [`stats`]: exact streaming moments of ω, Hardy–Ramanujan concentration,
//!   Erdős–Kac standardization and the Kolmogorov–Smirnov distance to Φ.
//! * [`maxent`]: geometric and Poisson reference laws, entropy accounting.
//! * [`levin`]: bit-exact toy prefix-free machines, exact toy complexity and
//!   exact dyadic algorithmic probability.
//! * [`learn`]: deterministic logistic probes on binary-digit features.
//! * [`cli`]: the `omegalab` command-line front end.

pub mod cli;
pub mod error;
pub mod learn;
pub mod levin;
pub mod maxent;
pub mod report;
pub mod segment_cache;
pub mod sieve;
pub mod stats;

pub use error::{Error, Result};

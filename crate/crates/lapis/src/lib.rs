//! Linear sum assignment toolkit.
//!
//! The crate bundles four layers that share one data model:
//!
//! * [`solvers`]: five exact minimizers (Hungarian, two shortest augmenting
//!   path variants, epsilon-scaling auction, integer tableau simplex) plus a
//!   brute-force oracle, all reporting optimal primal and dual solutions.
//! * [`certificate`]: self-contained optimality certificates built on linear
//!   programming duality, checkable in the clear in O(n^2).
//! * [`mpc`]: a simulated three-party honest-majority engine that runs the
//!   solvers over secret-shared costs and accounts for every opened value,
//!   communication round and secure operation.
//! * [`zk`]: Pedersen commitments over Ristretto and an aggregated range
//!   proof that turns a certificate into a publicly verifiable proof of
//!   optimality without revealing costs or duals.

pub mod bench;
pub mod certificate;
pub mod error;
pub mod model;
pub mod mpc;
pub mod solvers;
pub mod zk;

pub use error::Error;
pub use model::{Assignment, DualSolution, Sense, WeightMatrix};
pub use solvers::{solve, Algorithm, SolverResult};

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

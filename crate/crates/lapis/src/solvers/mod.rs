//! Exact assignment solvers.
//!
//! All five algorithms return an optimal assignment together with feasible
//! duals that are tight on every matched pair, so each run certifies its own
//! optimality. [`brute_force`] is the independent enumeration oracle used by
//! tests and the benchmark harness.

use std::fmt;
use std::str::FromStr;

use crate::model::{Sense, WeightMatrix};
use crate::{Assignment, DualSolution, Error, Result};

pub mod auction;
pub mod brute;
pub mod hungarian;
pub mod sap_acm;
pub mod sap_jv;
pub mod simplex;

pub use brute::brute_force;

/// Operation counters shared by every solver.
///
/// Counting conventions: a `min_find` is one scan that extracts a minimum
/// (or the two smallest values) from a slice; `comparisons` counts the
/// element comparisons those scans and all branch tests perform;
/// `zero_tests` counts equality-with-zero tests on matrix entries. The
/// `iterations` field counts the algorithm's own outer unit: Hungarian step
/// executions, augmenting paths for the shortest-path solvers, bids for the
/// auction and pivots for the simplex.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct OpStats {
    pub steps: u64,
    pub zero_tests: u64,
    pub min_finds: u64,
    pub comparisons: u64,
    pub iterations: u64,
}

/// Optimal assignment, certifying duals and operation counts.
#[derive(Debug, Clone)]
pub struct SolverResult {
    pub assignment: Assignment,
    pub dual: DualSolution,
    pub stats: OpStats,
}

/// The five exact solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Six-step Hungarian method with dual tracking.
    Hungarian,
    /// Shortest augmenting path with Dijkstra and potentials.
    SapAcm,
    /// Shortest augmenting path with column reduction and auction-style
    /// preprocessing.
    SapJv,
    /// Epsilon-scaling forward auction.
    Auction,
    /// Exact integer simplex on the inequality-form LP.
    Simplex,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Hungarian,
        Algorithm::SapAcm,
        Algorithm::SapJv,
        Algorithm::Auction,
        Algorithm::Simplex,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Hungarian => "hungarian",
            Algorithm::SapAcm => "sap-acm",
            Algorithm::SapJv => "sap-jv",
            Algorithm::Auction => "auction",
            Algorithm::Simplex => "simplex",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hungarian" => Ok(Algorithm::Hungarian),
            "sap-acm" => Ok(Algorithm::SapAcm),
            "sap-jv" => Ok(Algorithm::SapJv),
            "auction" => Ok(Algorithm::Auction),
            "simplex" => Ok(Algorithm::Simplex),
            other => Err(Error::BadParameter(format!(
                "unknown algorithm {other:?}, expected one of hungarian, sap-acm, sap-jv, auction, simplex"
            ))),
        }
    }
}

/// Solves a square instance with the chosen algorithm.
///
/// Both senses are supported: maximization is solved by negating the
/// weights and mapping the assignment, cost and duals back. Rectangular
/// instances should be passed through [`WeightMatrix::balance`] first
/// (`sap-jv` also accepts them directly).
pub fn solve(algorithm: Algorithm, w: &WeightMatrix) -> Result<SolverResult> {
    if w.sense() == Sense::Maximize {
        let flipped = w.negated();
        let res = solve(algorithm, &flipped)?;
        let assignment = Assignment {
            pairs: res.assignment.pairs,
            cost: -res.assignment.cost,
        };
        let dual = DualSolution {
            u: res.dual.u.iter().map(|&x| -x).collect(),
            v: res.dual.v.iter().map(|&x| -x).collect(),
        };
        return Ok(SolverResult {
            assignment,
            dual,
            stats: res.stats,
        });
    }
    match algorithm {
        Algorithm::Hungarian => hungarian::solve_hungarian(w),
        Algorithm::SapAcm => sap_acm::solve_sap_acm(w),
        Algorithm::SapJv => sap_jv::solve_sap_jv(w),
        Algorithm::Auction => auction::solve_auction(w, auction::DEFAULT_ALPHA),
        Algorithm::Simplex => simplex::solve_simplex_min(w),
    }
}

/// Shared sanity checks: solvers other than `sap-jv` want square minimize.
pub(crate) fn require_square_min(w: &WeightMatrix, who: &str) -> Result<usize> {
    if w.sense() != Sense::Minimize {
        return Err(Error::BadParameter(format!(
            "{who} solves minimization instances; negate the weights first"
        )));
    }
    w.side()
}

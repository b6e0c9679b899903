//! Commitment-based optimality proofs with a transparent setup.
//!
//! The prover publishes Pedersen commitments to the weights and duals plus
//! the assignment and optimum, then proves the optimality conditions on
//! the commitments: the dual sum opens to the optimum, the matched slack
//! commitments open to zero, and one aggregated range proof shows every
//! slack is nonnegative and fits the declared width. Verification never
//! sees a weight or a dual.
//!
//! All generators are hash-derived ([`group`]), so there is no trusted
//! setup, and the transcript is made non-interactive with a hash-chain
//! challenge derivation ([`transcript`]). Transcripts are logarithmic in
//! the instance size: `2 * (log2(next_pow2(n^2)) + log2(width)) + 4` group
//! elements and five scalars ([`optimality::proof_size`]).

use std::fmt;

pub mod encoding;
pub mod group;
pub mod ipp;
pub mod optimality;
pub mod pedersen;
pub mod range;
pub mod transcript;

pub use encoding::{decode_proof, encode_proof, manifest};
pub use group::{next_pow2, setup, setup_sized, GroupContext, MAX_SIDE, RANGE_WIDTH};
pub use optimality::{
    proof_size, prove_optimality, prove_optimality_unchecked, verify_optimality, FeasibilityProof,
};
pub use pedersen::{commit_instance, Blindings, Commitment, InstanceCommitments};

/// Reason a structurally valid proof failed to verify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reject {
    /// The public assignment is not a complete matching.
    Structure(String),
    /// The dual-sum opening does not match the claimed optimum.
    DualSum,
    /// A matched pair's slack commitment does not open to zero.
    TightEdge { i: usize, j: usize },
    /// The aggregated range proof failed.
    Range,
}

impl fmt::Display for Reject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reject::Structure(reason) => write!(f, "assignment structure: {reason}"),
            Reject::DualSum => write!(f, "dual sum does not open to the claimed optimum"),
            Reject::TightEdge { i, j } => {
                write!(f, "slack commitment at pair ({i},{j}) does not open to zero")
            }
            Reject::Range => write!(f, "aggregated range proof rejected"),
        }
    }
}

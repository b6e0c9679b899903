//! Simulated 3-party semi-honest runtime for oblivious assignment solving.
//!
//! The module has three layers: field arithmetic ([`field`]), the sharing
//! runtime with cost accounting and leakage logging ([`engine`]), and the
//! oblivious solver drivers ([`oblivious`]). Weights and duals stay
//! secret-shared from input to output; what the protocols reveal on purpose
//! (zero-test booleans, branch decisions, covering bits, argmin positions)
//! is recorded in a [`LeakageLog`], and the shuffle countermeasure decouples
//! those revealed positions from the true ones.

pub mod engine;
pub mod field;
pub mod oblivious;

pub use engine::{
    CostModel, Engine, LeakageEvent, LeakageLog, McConfig, PartyState, SharedValue,
    ShuffleHandles, Tag, PARTIES,
};
pub use field::PRIME;
pub use oblivious::{run_oblivious, ObliviousRun};

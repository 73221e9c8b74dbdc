//! Embedding oriented trees in tournaments.
//!
//! The crate is organised bottom-up: [`digraph`] holds the basic types and
//! generators, [`structure`] the tree decompositions, [`exact`] the
//! backtracking oracles, [`expander`] and [`regular`] the host-side
//! structure checks, [`allocate`] the randomized cluster embedding, and
//! [`pipeline`] the end-to-end routes.

pub mod allocate;
pub mod digraph;
pub mod error;
pub mod exact;
pub mod expander;
pub mod num;
pub mod pipeline;
pub mod regular;
pub mod structure;
pub mod rng;

pub use error::{Error, Result};
pub use expander::CheckMode;

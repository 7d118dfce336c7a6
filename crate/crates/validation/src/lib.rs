//! Test support for the `ist-core` crate: an exhaustive small-graph corpus,
//! reference computations on it, and randomized invariant checks.

pub mod corpus;
pub mod invariants;

//! Independent spanning trees in random graphs.
//!
//! Builders for families of independent spanning trees in sprinkled G(n,p)
//! and in random regular graphs given as unions of perfect matchings,
//! together with an exact verifier, small-instance oracles and a seeded
//! experiment harness.

pub mod gnp;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod random;
pub mod regular;
pub mod verify;

//! Drifting games: a player spreads probability weight over N chips, an
//! adversary drifts each chip by a bounded step subject to a weighted-mean
//! constraint, and after T rounds the player pays the fraction of chips in
//! the loss region.
//!
//! The crate provides four game variants (binary or interval steps, drift
//! built into the constraint or into the loss threshold), the heat-kernel
//! potential functions that drive near-optimal play for both sides, the
//! matching upper/lower loss bounds those potentials certify, a brute-force
//! minimax oracle for tiny instances, and runtime invariant checks.

pub mod bounds;
pub mod checks;
pub mod engine;
pub mod oracle;
pub mod rng;
pub mod special;
pub mod strategies;

//! Intrinsic randomness of rank-one projective measurements on finite-dimensional quantum
//! states: optimal min-, von Neumann and max-entropies against an adversary holding a
//! purification, fixed-measurement guessing probabilities with dual certificates, and the
//! search for measurements that attain the optima.

pub mod cli;
pub mod entropies;
pub mod error;
pub mod guessing;
pub mod io;
pub mod linalg;
pub mod measurements;
pub mod search;
pub mod states;

pub use error::{Error, Result};

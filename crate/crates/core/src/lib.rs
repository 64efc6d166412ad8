//! Exact, statistical, and certified-analytic machinery for the expected
//! edit distance between independent uniform random strings over a k-ary
//! alphabet.
//!
//! The crate is organized around three attacks on the same quantity, the
//! normalized expected distance `alpha_k(n) = E[d(x, y)] / n` and its
//! limit `alpha_k`:
//!
//! * [`exact`] computes `alpha_k(n)` as an exact rational for small `n`,
//!   by dynamic programming over multisets of edit-distance columns and
//!   by quotienting the string space by its symmetries.
//! * [`montecarlo`] estimates `alpha_k(n)` by sampling, with a
//!   deterministic counter-based sampler, and wraps the estimate in
//!   concentration-based confidence intervals that remain valid for the
//!   limit constant.
//! * [`bound`] produces certified analytic lower bounds on `alpha_k`
//!   through interval arithmetic: a concave rate function is maximized
//!   rigorously, and the largest `beta` with negative maximum is
//!   bracketed by trisection.
//!
//! [`distance`] supplies the shared edit-distance kernels.

pub mod bound;
pub mod distance;
mod error;
pub mod exact;
pub mod montecarlo;
mod rational;
mod string;

pub use error::{Error, Result};
pub use rational::ExactRational;
pub use string::SymbolString;

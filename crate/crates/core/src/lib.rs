//! Simulation of fractional Brownian motion and rough stochastic-volatility
//! models, Hurst-exponent estimation, and Monte Carlo pricing of
//! target-volatility options, with pluggable randomness sources (seeded
//! deterministic generators or raw 32-bit entropy files).

// Negated float comparisons like `!(x > 0.0)` are deliberate: they reject
// NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod fbm;
pub mod hurst;
pub mod models;
pub mod pricing;
pub mod rng;
pub mod special;
pub mod stats;

pub use error::{Error, Result};

//! Simulation and prediction laboratory for elitist evolutionary algorithms on
//! strictly monotone pseudo-boolean functions.
//!
//! The crate is organised bottom-up:
//!
//! - [`bits`]: packed bit strings with a cached ones-count.
//! - [`fitness`]: the [`Fitness`](fitness::Fitness) oracle trait, fitness values and the
//!   simple benchmarks (OneMax, BinVal, positive-weight linear functions).
//! - [`hottopic`]: seeded HotTopic instances with exact and incremental evaluation.
//! - [`distributions`]: flip-count distributions with sampling and falling moments.
//! - [`algorithms`]: the (μ+λ) EA/GA family, fast variants and the (1+(λ,λ)) GA.
//! - [`predictor`]: the Φ functional, the critical constants and the efficient/hard
//!   classification of flip-count distributions.
//! - [`harness`]: experiment configs, parallel seeded batches, summaries and file output.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod bits;
pub mod distributions;
mod error;
pub mod fitness;
pub mod harness;
pub mod hottopic;
pub mod predictor;
pub mod seed;

pub use bits::{BitVector, Density};
pub use error::{Error, Result};
pub use fitness::{Fitness, FitnessValue};

//! The α-Lomax compound fading channel model.
//!
//! The crate covers the distribution of the instantaneous SNR, closed-form
//! performance metrics (outage, average BER, ergodic capacity, short-packet
//! BLER) with their high-SNR asymptotes, the Fox H-function and ₂F₁ engine the
//! closed forms need, Monte-Carlo estimators and data fitting.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Frozen reference values keep every digit the oracle printed.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod error;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub mod distribution;

pub use distribution::{AlphaLomaxParams, Channel, SampleBatch, SamplingMethod};
pub mod metrics;
pub mod montecarlo;
pub mod optimize;
pub mod fitting;
pub mod validation;
pub mod cli;

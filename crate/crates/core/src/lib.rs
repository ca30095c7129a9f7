//! Smoothed expectile empirical likelihood (EL) estimation for linear models
//! whose responses may be missing at random.
//!
//! The crate covers the whole estimation pipeline:
//!
//! * [`kernels`]: compact-support kernels and the smoothed indicator `G_h`.
//! * [`model`]: datasets and the smoothed expectile estimating functions.
//! * [`el`]: Lagrange multipliers, implied probabilities and log-likelihood ratios.
//! * [`estimators`]: the A1/A2 Newton-type algorithms, their adaptive LASSO
//!   counterparts L1/L2, and the plain expectile fit used as a starting point.
//! * [`inference`]: Wilks-type chi-square tests, BIC tuning and τ selection.
//! * [`simulate`]: data generators and the Monte Carlo harness.
//!
//! The numerical core is generic over the floating point type through
//! [`Scalar`]; `f64` aliases are exported for the common case.

// `!(a > b)` is used on purpose so that NaN falls into the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod el;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod kernels;
pub mod model;
pub mod numkit;
pub mod simulate;

mod scalar;

pub use error::{Error, Result};
pub use kernels::Kernel;
pub use scalar::Scalar;

/// Double precision matrix.
pub type Matrix64 = numkit::Matrix<f64>;
/// Single precision matrix.
pub type Matrix32 = numkit::Matrix<f32>;
/// Double precision dataset.
pub type Dataset64 = model::Dataset<f64>;
/// Single precision dataset.
pub type Dataset32 = model::Dataset<f32>;
/// Double precision model configuration.
pub type ModelConfig64 = model::ModelConfig<f64>;
/// Double precision penalty configuration.
pub type PenaltyConfig64 = model::PenaltyConfig<f64>;
/// Double precision EL state.
pub type ElState64 = el::ElState<f64>;
/// Double precision fit result.
pub type FitResult64 = estimators::FitResult<f64>;

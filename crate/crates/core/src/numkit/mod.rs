//! Small dense linear algebra, chi-square/normal distribution functions and a
//! reproducible stream RNG.

mod dist;
mod matrix;
mod rng;

pub use dist::{
    chi2_cdf, chi2_quantile, chi2_sf, draw_chi2_1, draw_exponential, draw_normal, ln_gamma,
    normal_cdf, normal_quantile, regularized_gamma_p, regularized_gamma_q,
};
pub use matrix::{dot, norm, solve_lu, solve_spd, Matrix};
pub(crate) use matrix::{cholesky, cholesky_solve};
pub use rng::RngStream;

//! Empirical-likelihood core: the Lagrange multiplier of the moment
//! constraint, implied probabilities, and the smoothed expectile empirical
//! log-likelihood ratio (exact and quadratic approximation).

use serde::Serialize;

use crate::model::{moments, row_terms, Dataset, ModelConfig, Moments};
use crate::numkit::{dot, norm, solve_spd, Matrix};
use crate::{Error, Result, Scalar};

/// Solution of the inner EL problem at a fixed `β`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElState<T> {
    pub lambda: Vec<T>,
    /// `pᵢ = 1 / (n (1 + λ'ĝᵢ))` for every row; rows with a missing response get `1/n`.
    pub probs: Vec<T>,
    /// `2 Σ log(1 + λ'ĝᵢ)`
    pub ratio: T,
    pub converged: bool,
    pub iterations: usize,
}

/// Smoothed estimating functions of the rows with an observed response.
fn observed_scores<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta: &[T]) -> Vec<(usize, Vec<T>)> {
    (0..ds.n())
        .filter_map(|i| {
            let y = ds.response(i)?;
            let t = row_terms(cfg, ds.row(i), y, beta);
            Some((i, ds.row(i).iter().map(|&x| t.score * x).collect()))
        })
        .collect()
}

/// Owen's pseudo-logarithm: `log` above `eps`, quadratic continuation below.
#[inline]
fn log_star<T: Scalar>(z: T, eps: T) -> (T, T, T) {
    if z >= eps {
        (z.ln(), T::one() / z, T::one() / (z * z))
    } else {
        let r = z / eps;
        (
            eps.ln() - T::lit(1.5) + T::lit(2.0) * r - T::lit(0.5) * r * r,
            (T::lit(2.0) - r) / eps,
            T::one() / (eps * eps),
        )
    }
}

/// Solves `n⁻¹ Σ ĝᵢ / (1 + λ'ĝᵢ) = 0` by damped Newton on the concave dual.
///
/// The dual uses the pseudo-logarithm with threshold `1/n`, so the iteration is
/// well defined everywhere; a solution that leaves `1 + λ'ĝᵢ ≤ 1/n` for some
/// row, or a multiplier that runs off to infinity, means zero is not inside the
/// convex hull of the `ĝᵢ`. When rounding stalls the iteration, the residual is
/// accepted up to `√ε` times the mean score norm.
pub fn solve_lambda_exact<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta: &[T]) -> Result<ElState<T>> {
    let n = ds.n();
    let p = ds.p();
    let scores = observed_scores(ds, cfg, beta);
    if scores.len() < p {
        return Err(Error::InsufficientCompleteCases {
            needed: p,
            found: scores.len(),
        });
    }
    let nf = T::lit(n as f64);
    let eps = T::one() / nf;
    let gmax = scores.iter().fold(T::zero(), |m, (_, g)| m.max(norm(g)));
    let tol = T::lit(1e-11).max(T::epsilon() * T::lit(64.0));

    let dual = |lambda: &[T]| -> (T, Vec<T>, Matrix<T>) {
        let mut value = T::zero();
        let mut grad = vec![T::zero(); p];
        let mut hess = Matrix::zeros(p, p);
        for (_, g) in &scores {
            let (f, d1, d2) = log_star(T::one() + dot(lambda, g), eps);
            value += f;
            for (a, &gi) in grad.iter_mut().zip(g) {
                *a += d1 * gi;
            }
            hess.add_outer(d2, g, g);
        }
        (value, grad, hess)
    };

    let mut lambda = vec![T::zero(); p];
    let (mut value, mut grad, mut hess) = dual(&lambda);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        let resid = norm(&grad) / nf;
        if resid <= tol {
            converged = true;
            break;
        }
        iterations += 1;
        let step = solve_spd(&hess, &grad)?;
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<T> = lambda.iter().zip(&step).map(|(&l, &s)| l + t * s).collect();
            let (v, g, h) = dual(&trial);
            if v >= value - T::epsilon() * value.abs().max(T::one()) {
                lambda = trial;
                value = v;
                grad = g;
                hess = h;
                accepted = true;
                break;
            }
            t *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
        if norm(&lambda) * gmax > T::lit(1e10) {
            return Err(Error::HullViolation);
        }
        if t * norm(&step) <= T::epsilon() * T::lit(16.0) * (T::one() + norm(&lambda)) {
            break;
        }
    }
    // λ has stopped moving: accept a residual at the rounding floor of the score scale
    let gmean = scores.iter().fold(T::zero(), |s, (_, g)| s + norm(g)) / nf;
    if !converged && norm(&grad) / nf <= tol.max(T::epsilon().sqrt() * gmean) {
        converged = true;
    }
    if !converged {
        return Err(Error::NoConvergence { iterations });
    }

    let mut probs = vec![eps; n];
    let mut ratio = T::zero();
    for (i, g) in &scores {
        let z = T::one() + dot(&lambda, g);
        if z <= eps {
            return Err(Error::HullViolation);
        }
        probs[*i] = eps / z;
        ratio += T::lit(2.0) * z.ln();
    }
    Ok(ElState {
        lambda,
        probs,
        ratio: ratio.max(T::zero()),
        converged,
        iterations,
    })
}

/// Closed-form multiplier `λ ≈ S⁻¹ ḡ` from the first-order expansion.
pub fn lambda_approx<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta: &[T]) -> Result<Vec<T>> {
    lambda_from_moments(&moments(ds, cfg, beta))
}

pub(crate) fn lambda_from_moments<T: Scalar>(m: &Moments<T>) -> Result<Vec<T>> {
    if m.gbar.iter().all(|g| *g == T::zero()) {
        return Ok(vec![T::zero(); m.gbar.len()]);
    }
    solve_spd(&m.s, &m.gbar)
}

/// `2 Σ log(1 + λ'ĝᵢ)` for a given multiplier.
pub fn el_ratio_exact<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta: &[T], lambda: &[T]) -> Result<T> {
    if lambda.len() != ds.p() {
        return Err(Error::DimensionMismatch("lambda length differs from p".into()));
    }
    let mut total = T::zero();
    for i in 0..ds.n() {
        let Some(y) = ds.response(i) else { continue };
        let t = row_terms(cfg, ds.row(i), y, beta);
        let z = T::one() + t.score * dot(lambda, ds.row(i));
        if !(z > T::zero()) {
            return Err(Error::LogDomain);
        }
        total += z.ln();
    }
    Ok(T::lit(2.0) * total)
}

/// Quadratic approximation `n ḡ' S⁻¹ ḡ` of the log-likelihood ratio.
pub fn el_ratio_approx<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta: &[T]) -> Result<T> {
    approx_from_moments(ds.n(), &moments(ds, cfg, beta))
}

pub(crate) fn approx_from_moments<T: Scalar>(n: usize, m: &Moments<T>) -> Result<T> {
    let lambda = lambda_from_moments(m)?;
    Ok((T::lit(n as f64) * dot(&m.gbar, &lambda)).max(T::zero()))
}

/// Exact profile ratio at `β`, taken as `+∞` when zero leaves the convex hull.
pub fn el_ratio_profile<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta: &[T]) -> Result<T> {
    match solve_lambda_exact(ds, cfg, beta) {
        Ok(state) => Ok(state.ratio),
        Err(Error::HullViolation) => Ok(T::infinity()),
        Err(e) => Err(e),
    }
}

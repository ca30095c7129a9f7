//! Fitting algorithms.
//!
//! All four iterations share one Newton-type loop and differ only in the
//! linear system solved at each step:
//!
//! | algorithm | update |
//! |-----------|--------|
//! | A1 | `β ← β + M⁻¹ ḡ`, `M = n⁻¹ Σ ∂ĝᵢ/∂β (−1 + λ'ĝᵢ)`, `λ = S⁻¹ḡ` |
//! | A2 | `β ← β − J⁻¹ ḡ` |
//! | L1 | `β ← β + (M − D)⁻¹ (ḡ + Dβ)` |
//! | L2 | `β ← β − (J + D)⁻¹ (ḡ + Dβ)` |
//!
//! with `J = n⁻¹ Σ ∂ĝᵢ/∂β` and `D = diag(η ωⱼ / |βⱼ|)`. The penalized variants
//! freeze a coordinate at zero for good once it drops below `eps_zero`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::el::lambda_from_moments;
use crate::model::{moments, row_terms, Dataset, ModelConfig, PenaltyConfig};
use crate::numkit::{cholesky, cholesky_solve, dot, norm, solve_lu, Matrix};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    A1,
    A2,
    L1,
    L2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::A1, Algorithm::A2, Algorithm::L1, Algorithm::L2];

    pub fn is_penalized(self) -> bool {
        matches!(self, Algorithm::L1 | Algorithm::L2)
    }

    fn uses_lambda(self) -> bool {
        matches!(self, Algorithm::A1 | Algorithm::L1)
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::A1 => "a1",
            Algorithm::A2 => "a2",
            Algorithm::L1 => "l1",
            Algorithm::L2 => "l2",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a1" => Ok(Algorithm::A1),
            "a2" => Ok(Algorithm::A2),
            "l1" => Ok(Algorithm::L1),
            "l2" => Ok(Algorithm::L2),
            other => Err(Error::InvalidConfig(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult<T> {
    pub algorithm: Algorithm,
    pub beta: Vec<T>,
    /// `S⁻¹ḡ` at the final estimate.
    pub lambda: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    /// Indices `j` with `beta[j] != 0`.
    pub active_set: Vec<usize>,
    /// `‖β⁽ᵏ⁺¹⁾ − β⁽ᵏ⁾‖` per iteration.
    pub trace: Vec<T>,
    /// Number of unfrozen coordinates after each iteration.
    pub active_trace: Vec<usize>,
}

fn active_set<T: Scalar>(beta: &[T]) -> Vec<usize> {
    beta.iter()
        .enumerate()
        .filter(|(_, b)| **b != T::zero())
        .map(|(j, _)| j)
        .collect()
}

fn require_complete_cases<T: Scalar>(ds: &Dataset<T>) -> Result<()> {
    let found = ds.observed_count();
    if found < ds.p() || found == 0 {
        return Err(Error::InsufficientCompleteCases {
            needed: ds.p().max(1),
            found,
        });
    }
    Ok(())
}

/// Expectile regression on the complete cases by iteratively reweighted least
/// squares with weights `τ` (residual ≥ 0) and `1 − τ` (residual < 0).
pub fn expectile_fit<T: Scalar>(ds: &Dataset<T>, tau: T) -> Result<Vec<T>> {
    if !(tau > T::zero() && tau < T::one()) {
        return Err(Error::InvalidConfig(format!("tau = {tau} not in (0, 1)")));
    }
    require_complete_cases(ds)?;
    let p = ds.p();
    let half = T::lit(0.5);
    let mut weights: Vec<T> = (0..ds.n()).map(|_| half).collect();
    let mut beta = vec![T::zero(); p];
    let tol = T::lit(1e-8).max(T::epsilon() * T::lit(100.0));
    for iter in 0..500 {
        let mut xtwx = Matrix::zeros(p, p);
        let mut xtwy = vec![T::zero(); p];
        for i in 0..ds.n() {
            let Some(y) = ds.response(i) else { continue };
            let xrow = ds.row(i);
            xtwx.add_outer(weights[i], xrow, xrow);
            for (a, &x) in xtwy.iter_mut().zip(xrow) {
                *a += weights[i] * x * y;
            }
        }
        let l = cholesky(&xtwx).ok_or(Error::RankDeficient)?;
        let next = cholesky_solve(&l, &xtwy);
        let step: Vec<T> = next.iter().zip(&beta).map(|(&a, &b)| a - b).collect();
        beta = next;
        if iter > 0 && norm(&step) < tol * (T::one() + norm(&beta)) {
            break;
        }
        let mut changed = false;
        for i in 0..ds.n() {
            let Some(y) = ds.response(i) else { continue };
            let w = if y - dot(ds.row(i), &beta) >= T::zero() { tau } else { T::one() - tau };
            changed |= w != weights[i];
            weights[i] = w;
        }
        if !changed && iter > 0 {
            break;
        }
    }
    Ok(beta)
}

/// Adaptive LASSO weights `|pilotⱼ|^{-γ}`; pilots below `eps_zero` in
/// magnitude map to `+∞`, meaning the coordinate is frozen at zero.
pub fn adaptive_weights<T: Scalar>(pilot: &[T], gamma: T, eps_zero: T) -> Vec<T> {
    pilot
        .iter()
        .map(|b| {
            if b.abs() < eps_zero {
                T::infinity()
            } else {
                b.abs().powf(-gamma)
            }
        })
        .collect()
}

struct Penalty<T> {
    eta: T,
    weights: Vec<T>,
}

fn newton_loop<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    algorithm: Algorithm,
    penalty: Option<Penalty<T>>,
    beta0: Vec<T>,
) -> Result<FitResult<T>> {
    let p = ds.p();
    let nf = T::lit(ds.n() as f64);
    let mut beta = beta0;
    let mut active = vec![true; p];
    if let Some(pen) = &penalty {
        for j in 0..p {
            if pen.weights[j].is_infinite() || beta[j].abs() < cfg.eps_zero {
                beta[j] = T::zero();
                active[j] = false;
            }
        }
    }
    let start_norm = norm(&beta);
    let blowup = T::lit(1e6) * (T::one() + start_norm);
    let mut trace = Vec::new();
    let mut active_trace = Vec::new();
    let mut converged = false;

    while trace.len() < cfg.max_iter {
        let idx: Vec<usize> = (0..p).filter(|&j| active[j]).collect();
        if idx.is_empty() {
            converged = true;
            break;
        }
        let m = moments(ds, cfg, &beta);
        let mut system = if algorithm.uses_lambda() {
            let lambda = lambda_from_moments(&m)?;
            let mut a1 = Matrix::zeros(p, p);
            for i in 0..ds.n() {
                let Some(y) = ds.response(i) else { continue };
                let xrow = ds.row(i);
                let t = row_terms(cfg, xrow, y, &beta);
                let tilt = -T::one() + t.score * dot(&lambda, xrow);
                a1.add_outer(t.slope * tilt / nf, xrow, xrow);
            }
            a1.principal(&idx)
        } else {
            m.j.principal(&idx)
        };
        let mut rhs: Vec<T> = idx.iter().map(|&j| m.gbar[j]).collect();
        if let Some(pen) = penalty.as_ref().filter(|pen| pen.eta != T::zero()) {
            for (a, &j) in idx.iter().enumerate() {
                let d = pen.eta * pen.weights[j] / beta[j].abs();
                if algorithm.uses_lambda() {
                    system[(a, a)] -= d;
                } else {
                    system[(a, a)] += d;
                }
                rhs[a] += d * beta[j];
            }
        }
        let step = solve_lu(&system, &rhs)?;
        let previous = beta.clone();
        for (a, &j) in idx.iter().enumerate() {
            if algorithm.uses_lambda() {
                beta[j] += step[a];
            } else {
                beta[j] -= step[a];
            }
        }
        if penalty.is_some() {
            for &j in &idx {
                if beta[j].abs() < cfg.eps_zero {
                    beta[j] = T::zero();
                    active[j] = false;
                }
            }
        }
        let delta: Vec<T> = beta.iter().zip(&previous).map(|(&a, &b)| a - b).collect();
        let moved = norm(&delta);
        trace.push(moved);
        active_trace.push(active.iter().filter(|&&a| a).count());
        if !moved.is_finite() || norm(&beta) > blowup {
            return Err(Error::NoConvergence {
                iterations: trace.len(),
            });
        }
        if moved < cfg.nu {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: trace.len(),
        });
    }
    let lambda = lambda_from_moments(&moments(ds, cfg, &beta)).unwrap_or_else(|_| vec![T::zero(); p]);
    Ok(FitResult {
        algorithm,
        active_set: active_set(&beta),
        beta,
        lambda,
        iterations: trace.len(),
        converged,
        trace,
        active_trace,
    })
}

fn start<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta0: Option<&[T]>) -> Result<Vec<T>> {
    cfg.validate()?;
    require_complete_cases(ds)?;
    match beta0 {
        Some(b) if b.len() != ds.p() => Err(Error::DimensionMismatch(format!(
            "starting point has length {}, expected {}",
            b.len(),
            ds.p()
        ))),
        Some(b) => Ok(b.to_vec()),
        None => expectile_fit(ds, cfg.tau),
    }
}

/// Smoothed expectile MEL estimate with the multiplier refreshed each step.
pub fn fit_a1<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta0: Option<&[T]>) -> Result<FitResult<T>> {
    let b = start(ds, cfg, beta0)?;
    newton_loop(ds, cfg, Algorithm::A1, None, b)
}

/// Newton–Raphson on `n⁻¹ Σ ĝᵢ(β) = 0` with the multiplier held at zero.
pub fn fit_a2<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta0: Option<&[T]>) -> Result<FitResult<T>> {
    let b = start(ds, cfg, beta0)?;
    newton_loop(ds, cfg, Algorithm::A2, None, b)
}

fn penalty_for<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, pen: &PenaltyConfig<T>) -> Result<Penalty<T>> {
    if pen.pilot.len() != ds.p() {
        return Err(Error::DimensionMismatch(format!(
            "pilot has length {}, expected {}",
            pen.pilot.len(),
            ds.p()
        )));
    }
    Ok(Penalty {
        eta: pen.eta,
        weights: adaptive_weights(&pen.pilot, pen.gamma, cfg.eps_zero),
    })
}

/// Adaptive LASSO fit, A1-style system.
pub fn fit_l1<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    pen: &PenaltyConfig<T>,
    beta0: Option<&[T]>,
) -> Result<FitResult<T>> {
    let penalty = penalty_for(ds, cfg, pen)?;
    let b = start(ds, cfg, beta0)?;
    newton_loop(ds, cfg, Algorithm::L1, Some(penalty), b)
}

/// Adaptive LASSO fit, A2-style system.
pub fn fit_l2<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    pen: &PenaltyConfig<T>,
    beta0: Option<&[T]>,
) -> Result<FitResult<T>> {
    let penalty = penalty_for(ds, cfg, pen)?;
    let b = start(ds, cfg, beta0)?;
    newton_loop(ds, cfg, Algorithm::L2, Some(penalty), b)
}

/// Runs the requested algorithm; `pen` is required for L1/L2 and ignored otherwise.
pub fn fit<T: Scalar>(
    algorithm: Algorithm,
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    pen: Option<&PenaltyConfig<T>>,
    beta0: Option<&[T]>,
) -> Result<FitResult<T>> {
    let need_pen = || Error::InvalidConfig(format!("{algorithm} needs a penalty configuration"));
    match algorithm {
        Algorithm::A1 => fit_a1(ds, cfg, beta0),
        Algorithm::A2 => fit_a2(ds, cfg, beta0),
        Algorithm::L1 => fit_l1(ds, cfg, pen.ok_or_else(need_pen)?, beta0),
        Algorithm::L2 => fit_l2(ds, cfg, pen.ok_or_else(need_pen)?, beta0),
    }
}

/// Where the pilot estimate for the adaptive weights comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PilotMode {
    /// A2 fit on the same rows as the penalized fit.
    #[default]
    Same,
    /// A2 fit on the first half of the rows; the penalized fit uses the rest.
    Split,
}

impl FromStr for PilotMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "same" => Ok(PilotMode::Same),
            "split" => Ok(PilotMode::Split),
            other => Err(Error::InvalidConfig(format!("unknown pilot mode '{other}'"))),
        }
    }
}

impl PilotMode {
    /// Pilot estimate plus the dataset the penalized fit should run on.
    pub fn prepare<T: Scalar>(self, ds: &Dataset<T>, cfg: &ModelConfig<T>) -> Result<(Vec<T>, Dataset<T>)> {
        match self {
            PilotMode::Same => Ok((fit_a2(ds, cfg, None)?.beta, ds.clone())),
            PilotMode::Split => {
                let half = ds.n() / 2;
                let first: Vec<usize> = (0..half).collect();
                let second: Vec<usize> = (half..ds.n()).collect();
                let pilot_ds = ds.select_rows(&first)?;
                let fit_ds = ds.select_rows(&second)?;
                Ok((fit_a2(&pilot_ds, cfg, None)?.beta, fit_ds))
            }
        }
    }
}

//! Wilks-type tests, BIC tuning of the penalty level and the τ-selection rules.

use rayon::prelude::*;
use serde::Serialize;

use crate::el::{el_ratio_approx, el_ratio_exact, lambda_approx};
use crate::estimators::{adaptive_weights, fit_a2, fit_l2, FitResult};
use crate::model::{Dataset, ModelConfig, PenaltyConfig};
use crate::numkit::{chi2_quantile, chi2_sf};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub statistic: f64,
    pub df: u32,
    pub critical: f64,
    pub pvalue: f64,
    pub reject: bool,
}

/// Compares a statistic against the `χ²(df)` quantile at level `1 − alpha`.
pub fn chi2_test(statistic: f64, df: u32, alpha: f64) -> Result<TestReport> {
    if df == 0 {
        return Err(Error::InvalidConfig("df must be positive".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidProbability(alpha));
    }
    if !(statistic >= 0.0) {
        return Err(Error::NonFinite("test statistic"));
    }
    let critical = chi2_quantile(1.0 - alpha, df)?;
    Ok(TestReport {
        statistic,
        df,
        critical,
        pvalue: chi2_sf(statistic, df),
        reject: statistic > critical,
    })
}

/// Tests `β = beta_hypothesis` with the quadratic EL statistic.
pub fn wilks_test<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    beta_hypothesis: &[T],
    df: u32,
    alpha: f64,
) -> Result<TestReport> {
    if beta_hypothesis.len() != ds.p() {
        return Err(Error::DimensionMismatch(format!(
            "hypothesis has length {}, expected {}",
            beta_hypothesis.len(),
            ds.p()
        )));
    }
    let stat = el_ratio_approx(ds, cfg, beta_hypothesis)?;
    chi2_test(stat.as_f64(), df, alpha)
}

/// Wilks test restricted to the nonzero coordinates of `beta`, with the
/// remaining coordinates fixed at zero and `df = |active set|`.
pub fn submodel_wilks_test<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    beta: &[T],
    alpha: f64,
) -> Result<TestReport> {
    let active: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != T::zero()).collect();
    if active.is_empty() {
        return Err(Error::EmptyActiveSet);
    }
    let sub = ds.select_columns(&active)?;
    let sub_beta: Vec<T> = active.iter().map(|&j| beta[j]).collect();
    wilks_test(&sub, cfg, &sub_beta, active.len() as u32, alpha)
}

/// `n η Σ ωⱼ |βⱼ|` with frozen coordinates contributing nothing.
pub fn penalty_term<T: Scalar>(n: usize, cfg: &ModelConfig<T>, pen: &PenaltyConfig<T>, beta: &[T]) -> T {
    let weights = adaptive_weights(&pen.pilot, pen.gamma, cfg.eps_zero);
    let sum = weights
        .iter()
        .zip(beta)
        .filter(|(w, b)| w.is_finite() && **b != T::zero())
        .fold(T::zero(), |acc, (&w, &b)| acc + w * b.abs());
    T::lit(n as f64) * pen.eta * sum
}

/// Penalized log-likelihood ratio for a given multiplier.
pub fn penalized_ratio_with_lambda<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    pen: &PenaltyConfig<T>,
    beta: &[T],
    lambda: &[T],
) -> Result<T> {
    let ratio = match el_ratio_exact(ds, cfg, beta, lambda) {
        Err(Error::LogDomain) => el_ratio_approx(ds, cfg, beta)?,
        other => other?,
    };
    Ok(ratio + penalty_term(ds.n(), cfg, pen, beta))
}

/// Penalized log-likelihood ratio with `λ ≈ S⁻¹ḡ`.
pub fn penalized_ratio<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    pen: &PenaltyConfig<T>,
    beta: &[T],
) -> Result<T> {
    let lambda = lambda_approx(ds, cfg, beta)?;
    penalized_ratio_with_lambda(ds, cfg, pen, beta, &lambda)
}

/// `ratio + log(n) · k`.
pub fn bic_value<T: Scalar>(ratio: T, n: usize, active: usize) -> T {
    ratio + T::lit((n as f64).ln() * active as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BicRecord<T> {
    pub eta: T,
    pub bic: T,
    pub penalized_ratio: T,
    pub active_set: Vec<usize>,
    pub beta: Vec<T>,
}

pub fn bic<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    pen: &PenaltyConfig<T>,
    fit: &FitResult<T>,
) -> Result<BicRecord<T>> {
    let ratio = penalized_ratio(ds, cfg, pen, &fit.beta)?;
    Ok(BicRecord {
        eta: pen.eta,
        bic: bic_value(ratio, ds.n(), fit.active_set.len()),
        penalized_ratio: ratio,
        active_set: fit.active_set.clone(),
        beta: fit.beta.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure<T> {
    pub eta: T,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BicSweep<T> {
    pub best: BicRecord<T>,
    pub records: Vec<BicRecord<T>>,
    pub failures: Vec<CellFailure<T>>,
}

/// L2 fits over a grid of penalty levels with an A2 pilot from the same data.
pub fn bic_sweep<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, gamma: T, grid: &[T]) -> Result<BicSweep<T>> {
    let pilot = fit_a2(ds, cfg, None)?.beta;
    bic_sweep_with_pilot(ds, cfg, gamma, &pilot, grid)
}

/// As [`bic_sweep`] with a caller-supplied pilot. The minimum BIC wins; exact
/// ties go to the larger `η`, then to the earlier grid cell.
pub fn bic_sweep_with_pilot<T: Scalar>(
    ds: &Dataset<T>,
    cfg: &ModelConfig<T>,
    gamma: T,
    pilot: &[T],
    grid: &[T],
) -> Result<BicSweep<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty eta grid".into()));
    }
    let pens = grid
        .iter()
        .map(|&eta| PenaltyConfig::new(eta, gamma, pilot.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<Result<BicRecord<T>>> = pens
        .par_iter()
        .map(|pen| fit_l2(ds, cfg, pen, None).and_then(|fit| bic(ds, cfg, pen, &fit)))
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for (cell, &eta) in cells.into_iter().zip(grid) {
        match cell {
            Ok(r) => records.push(r),
            Err(e) => {
                failures.push(CellFailure { eta, error: e.to_string() });
                first_error.get_or_insert(e);
            }
        }
    }
    let mut best: Option<&BicRecord<T>> = None;
    for r in &records {
        best = match best {
            None => Some(r),
            Some(b) if r.bic < b.bic || (r.bic == b.bic && r.eta > b.eta) => Some(r),
            keep => keep,
        };
    }
    let best = match best {
        Some(b) => b.clone(),
        None => return Err(first_error.unwrap_or(Error::InvalidConfig("empty eta grid".into()))),
    };
    Ok(BicSweep { best, records, failures })
}

fn median<T: Scalar>(v: &[T]) -> T {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        (s[m - 1] + s[m]) / T::lit(2.0)
    }
}

/// Data-driven τ from responses centred at the median and scaled by the mean
/// absolute deviation about it.
pub fn empirical_tau<T: Scalar>(y: &[T]) -> Result<T> {
    if y.is_empty() {
        return Err(Error::DegenerateSample);
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("responses"));
    }
    let med = median(y);
    let mad = y.iter().fold(T::zero(), |a, &v| a + (v - med).abs()) / T::lit(y.len() as f64);
    if !(mad > T::zero()) {
        return Err(Error::DegenerateSample);
    }
    let (mut neg, mut pos) = (T::zero(), T::zero());
    for &v in y {
        let t = (v - med) / mad;
        if t < T::zero() {
            neg += t;
        } else if t > T::zero() {
            pos += t;
        }
    }
    Ok((neg / (neg - pos)).max(T::zero()).min(T::one()))
}

/// The τ at which the sample's τ-expectile is zero.
pub fn zero_expectile_tau<T: Scalar>(residuals: &[T]) -> Result<T> {
    let (mut plus, mut minus) = (T::zero(), T::zero());
    for &e in residuals {
        if !e.is_finite() {
            return Err(Error::NonFinite("residuals"));
        }
        if e > T::zero() {
            plus += e;
        } else if e < T::zero() {
            minus -= e;
        }
    }
    if plus == T::zero() || minus == T::zero() {
        return Err(Error::OneSidedSample);
    }
    Ok(minus / (plus + minus))
}

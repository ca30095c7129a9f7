//! Data model and the smoothed expectile estimating functions
//! `ĝᵢ(β) = δᵢ ψ_h(Xᵢ, Yᵢ; β) (Yᵢ − Xᵢ'β) Xᵢ`.

use serde::{Deserialize, Serialize};

use crate::kernels::Kernel;
use crate::numkit::{dot, Matrix};
use crate::{Error, Result, Scalar};

/// Covariates plus responses that may be missing at random.
///
/// Unobserved responses are stored as `None`; the missingness flag `δᵢ` is
/// exactly `y[i].is_some()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    x: Matrix<T>,
    y: Vec<Option<T>>,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset from covariates, responses and missingness flags.
    ///
    /// Responses of rows with `delta[i] == false` are discarded; rows with
    /// `delta[i] == true` need a finite response.
    pub fn new(x: Matrix<T>, y: Vec<Option<T>>, delta: Vec<bool>) -> Result<Self> {
        let n = x.rows();
        if n == 0 || x.cols() == 0 {
            return Err(Error::DimensionMismatch("dataset needs n >= 1 and p >= 1".into()));
        }
        if y.len() != n || delta.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} covariate rows, {} responses, {} flags",
                n,
                y.len(),
                delta.len()
            )));
        }
        let mut masked = Vec::with_capacity(n);
        for (yi, di) in y.into_iter().zip(delta) {
            if di {
                match yi {
                    Some(v) if v.is_finite() => masked.push(Some(v)),
                    _ => return Err(Error::NonFinite("observed response")),
                }
            } else {
                masked.push(None);
            }
        }
        Ok(Dataset { x, y: masked })
    }

    /// Dataset with every response observed.
    pub fn complete(x: Matrix<T>, y: Vec<T>) -> Result<Self> {
        let n = y.len();
        Self::new(x, y.into_iter().map(Some).collect(), vec![true; n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.x.cols()
    }

    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        self.x.row(i)
    }

    #[inline]
    pub fn delta(&self, i: usize) -> bool {
        self.y[i].is_some()
    }

    #[inline]
    pub fn response(&self, i: usize) -> Option<T> {
        self.y[i]
    }

    pub fn responses(&self) -> &[Option<T>] {
        &self.y
    }

    pub fn observed_count(&self) -> usize {
        self.y.iter().filter(|v| v.is_some()).count()
    }

    pub fn observed_responses(&self) -> Vec<T> {
        self.y.iter().flatten().copied().collect()
    }

    /// Same rows restricted to the given covariate columns.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() || columns.iter().any(|&j| j >= self.p()) {
            return Err(Error::DimensionMismatch(format!(
                "invalid column selection {columns:?} for p = {}",
                self.p()
            )));
        }
        Ok(Dataset {
            x: self.x.select_columns(columns),
            y: self.y.clone(),
        })
    }

    /// Subset of rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let p = self.p();
        let mut data = Vec::with_capacity(rows.len() * p);
        let mut y = Vec::with_capacity(rows.len());
        for &i in rows {
            if i >= self.n() {
                return Err(Error::DimensionMismatch(format!("row {i} out of range")));
            }
            data.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        let delta = y.iter().map(Option::is_some).collect();
        Dataset::new(Matrix::from_vec(rows.len(), p, data)?, y, delta)
    }
}

/// Smoothing and stopping parameters shared by all estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig<T> {
    /// Expectile index in (0, 1).
    pub tau: T,
    /// Bandwidth of the smoothed indicator.
    pub h: T,
    pub kernel: Kernel,
    /// Outer stopping tolerance on `‖β⁽ᵏ⁺¹⁾ − β⁽ᵏ⁾‖`.
    pub nu: T,
    /// Coefficients below this magnitude are frozen at zero by L1/L2.
    pub eps_zero: T,
    pub max_iter: usize,
}

impl<T: Scalar> ModelConfig<T> {
    pub fn new(tau: T, h: T) -> Result<Self> {
        let cfg = ModelConfig {
            tau,
            h,
            kernel: Kernel::default(),
            nu: T::lit(1e-2),
            eps_zero: T::lit(1e-4),
            max_iter: 200,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration with the default bandwidth `h = n^{-1/4}`.
    pub fn for_sample_size(n: usize, tau: T) -> Result<Self> {
        Self::new(tau, default_bandwidth(n))
    }

    pub fn with_kernel(mut self, kernel: Kernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_nu(mut self, nu: T) -> Self {
        self.nu = nu;
        self
    }

    pub fn with_eps_zero(mut self, eps_zero: T) -> Self {
        self.eps_zero = eps_zero;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > T::zero() && self.tau < T::one()) {
            return Err(Error::InvalidConfig(format!("tau = {} not in (0, 1)", self.tau)));
        }
        if !(self.h > T::zero()) || !self.h.is_finite() {
            return Err(Error::NonpositiveBandwidth(self.h.as_f64()));
        }
        if !(self.nu > T::zero()) {
            return Err(Error::InvalidConfig("nu must be positive".into()));
        }
        if !(self.eps_zero > T::zero()) {
            return Err(Error::InvalidConfig("eps_zero must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Adaptive LASSO tuning: `η_n`, the weight power `γ` and the pilot estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig<T> {
    pub eta: T,
    pub gamma: T,
    pub pilot: Vec<T>,
}

impl<T: Scalar> PenaltyConfig<T> {
    pub fn new(eta: T, gamma: T, pilot: Vec<T>) -> Result<Self> {
        if !(eta >= T::zero()) || !eta.is_finite() {
            return Err(Error::InvalidConfig(format!("eta = {eta} must be >= 0")));
        }
        if !(gamma > T::zero()) {
            return Err(Error::InvalidConfig(format!("gamma = {gamma} must be > 0")));
        }
        if pilot.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("pilot estimate"));
        }
        Ok(PenaltyConfig { eta, gamma, pilot })
    }
}

/// `h = n^{-1/4}`.
pub fn default_bandwidth<T: Scalar>(n: usize) -> T {
    T::lit((n.max(1) as f64).powf(-0.25))
}

/// `η_n = n^{-5/6}`.
pub fn default_eta<T: Scalar>(n: usize) -> T {
    T::lit((n.max(1) as f64).powf(-5.0 / 6.0))
}

/// Asymmetric squared loss `ρ_τ(x) = |τ − 1{x<0}| x²`.
pub fn expectile_loss<T: Scalar>(tau: T, x: T) -> T {
    if x < T::zero() {
        (T::one() - tau) * x * x
    } else {
        tau * x * x
    }
}

/// `ψ_h = τ + (1 − 2τ) G_h(x'β − y)`.
pub fn psi_h<T: Scalar>(cfg: &ModelConfig<T>, xrow: &[T], yval: T, beta: &[T]) -> T {
    let fitted = dot(xrow, beta);
    cfg.tau + (T::one() - T::lit(2.0) * cfg.tau) * cfg.kernel.cdf((fitted - yval) / cfg.h)
}

/// Per-row scalars: `ĝᵢ = score·Xᵢ` and `∂ĝᵢ/∂β = slope·XᵢXᵢ'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RowTerms<T> {
    pub score: T,
    pub slope: T,
    pub residual: T,
}

#[inline]
pub(crate) fn row_terms<T: Scalar>(cfg: &ModelConfig<T>, xrow: &[T], yval: T, beta: &[T]) -> RowTerms<T> {
    let residual = yval - dot(xrow, beta);
    let u = -residual / cfg.h;
    let skew = T::one() - T::lit(2.0) * cfg.tau;
    let psi = cfg.tau + skew * cfg.kernel.cdf(u);
    RowTerms {
        score: psi * residual,
        slope: skew / cfg.h * cfg.kernel.pdf(u) * residual - psi,
        residual,
    }
}

/// Unsmoothed `gᵢ(β) = δᵢ (τ + (1−2τ) 1{Yᵢ − Xᵢ'β < 0}) (Yᵢ − Xᵢ'β) Xᵢ`.
pub fn g_raw<T: Scalar>(ds: &Dataset<T>, i: usize, tau: T, beta: &[T]) -> Vec<T> {
    let xrow = ds.row(i);
    match ds.response(i) {
        None => vec![T::zero(); ds.p()],
        Some(y) => {
            let r = y - dot(xrow, beta);
            let w = if r < T::zero() { T::one() - tau } else { tau };
            xrow.iter().map(|&x| w * r * x).collect()
        }
    }
}

/// Smoothed `ĝᵢ(β)`; zero for rows with a missing response.
pub fn g_smooth<T: Scalar>(ds: &Dataset<T>, i: usize, cfg: &ModelConfig<T>, beta: &[T]) -> Vec<T> {
    match ds.response(i) {
        None => vec![T::zero(); ds.p()],
        Some(y) => {
            let t = row_terms(cfg, ds.row(i), y, beta);
            ds.row(i).iter().map(|&x| t.score * x).collect()
        }
    }
}

/// `∂ĝᵢ/∂β = δᵢ ((1−2τ)/h K((Xᵢ'β − Yᵢ)/h)(Yᵢ − Xᵢ'β) − ψ_h) XᵢXᵢ'`.
pub fn g_smooth_jacobian<T: Scalar>(ds: &Dataset<T>, i: usize, cfg: &ModelConfig<T>, beta: &[T]) -> Matrix<T> {
    let p = ds.p();
    let mut m = Matrix::zeros(p, p);
    if let Some(y) = ds.response(i) {
        let t = row_terms(cfg, ds.row(i), y, beta);
        m.add_outer(t.slope, ds.row(i), ds.row(i));
    }
    m
}

/// Hessian of the `j`-th component of `ĝᵢ`:
/// `δᵢ X_{ij} (1−2τ) [h⁻² K'(u)(Yᵢ − Xᵢ'β) − 2h⁻¹ K(u)] XᵢXᵢ'` with `u = (Xᵢ'β − Yᵢ)/h`.
pub fn g_smooth_hessian_slice<T: Scalar>(
    ds: &Dataset<T>,
    i: usize,
    j: usize,
    cfg: &ModelConfig<T>,
    beta: &[T],
) -> Matrix<T> {
    let p = ds.p();
    let mut m = Matrix::zeros(p, p);
    if let Some(y) = ds.response(i) {
        let xrow = ds.row(i);
        let r = y - dot(xrow, beta);
        let u = -r / cfg.h;
        let skew = T::one() - T::lit(2.0) * cfg.tau;
        let h = cfg.h;
        let curvature = skew
            * (cfg.kernel.pdf_derivative(u) * r / (h * h) - T::lit(2.0) * cfg.kernel.pdf(u) / h);
        m.add_outer(xrow[j] * curvature, xrow, xrow);
    }
    m
}

/// Sample moments of the smoothed estimating functions at `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments<T> {
    /// `n⁻¹ Σ ĝᵢ`
    pub gbar: Vec<T>,
    /// `n⁻¹ Σ ĝᵢĝᵢ'`
    pub s: Matrix<T>,
    /// `n⁻¹ Σ ∂ĝᵢ/∂β`
    pub j: Matrix<T>,
}

pub fn moments<T: Scalar>(ds: &Dataset<T>, cfg: &ModelConfig<T>, beta: &[T]) -> Moments<T> {
    let p = ds.p();
    let mut gbar = vec![T::zero(); p];
    let mut s = Matrix::zeros(p, p);
    let mut j = Matrix::zeros(p, p);
    for i in 0..ds.n() {
        let Some(y) = ds.response(i) else { continue };
        let xrow = ds.row(i);
        let t = row_terms(cfg, xrow, y, beta);
        for (g, &x) in gbar.iter_mut().zip(xrow) {
            *g += t.score * x;
        }
        s.add_outer(t.score * t.score, xrow, xrow);
        j.add_outer(t.slope, xrow, xrow);
    }
    let inv_n = T::one() / T::lit(ds.n() as f64);
    gbar.iter_mut().for_each(|g| *g *= inv_n);
    s.scale_mut(inv_n);
    j.scale_mut(inv_n);
    Moments { gbar, s, j }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::RngStream;

    fn ds1(x: f64, y: Option<f64>) -> Dataset<f64> {
        let d = y.is_some();
        Dataset::new(Matrix::from_vec(1, 1, vec![x]).unwrap(), vec![y], vec![d]).unwrap()
    }

    fn cfg(tau: f64, h: f64) -> ModelConfig<f64> {
        ModelConfig::new(tau, h).unwrap()
    }

    #[test]
    fn expectile_loss_examples() {
        assert_eq!(expectile_loss(0.5, 2.0), 2.0);
        assert_eq!(expectile_loss(0.3, 0.0), 0.0);
        assert_eq!(expectile_loss(0.75, -2.0), 1.0);
    }

    #[test]
    fn psi_examples() {
        let c = cfg(0.5, 0.2);
        assert_eq!(psi_h(&c, &[1.0, 2.0], 7.0, &[0.3, -0.1]), 0.5);
        let c = cfg(0.7, 0.2);
        assert!((psi_h(&c, &[1.0], 1.0, &[1.0]) - 0.5).abs() < 1e-15);
        // residual y − x'β = −2h
        let v = psi_h(&c, &[1.0], 1.0 - 0.4, &[1.0]);
        assert!((v - 0.3).abs() < 1e-15);
    }

    #[test]
    fn psi_range() {
        let c = cfg(0.2, 0.5);
        for i in 0..100 {
            let y = -2.0 + 0.04 * i as f64;
            let v = psi_h(&c, &[1.0], y, &[0.0]);
            assert!((0.2..=0.8).contains(&v));
        }
    }

    #[test]
    fn g_raw_examples() {
        assert_eq!(g_raw(&ds1(2.0, None), 0, 0.25, &[0.0]), vec![0.0]);
        assert_eq!(g_raw(&ds1(2.0, Some(2.0)), 0, 0.25, &[1.0]), vec![0.0]);
        assert_eq!(g_raw(&ds1(2.0, Some(1.0)), 0, 0.25, &[0.0]), vec![0.5]);
    }

    #[test]
    fn g_smooth_examples() {
        let c = cfg(0.3, 0.1);
        assert_eq!(g_smooth(&ds1(2.0, None), 0, &c, &[0.0]), vec![0.0]);
        assert_eq!(g_smooth(&ds1(2.0, Some(2.0)), 0, &c, &[1.0]), vec![0.0]);
        // residual 3h: smoother saturated
        let d = ds1(1.5, Some(0.3));
        let beta = [0.0];
        assert_eq!(g_smooth(&d, 0, &c, &beta), g_raw(&d, 0, 0.3, &beta));
    }

    #[test]
    fn jacobian_at_half_tau_is_constant() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let d = Dataset::complete(x, vec![0.7]).unwrap();
        let j = g_smooth_jacobian(&d, 0, &cfg(0.5, 0.3), &[0.1, 0.2]);
        assert_eq!(j.as_slice(), &[-0.5, -1.0, -1.0, -2.0]);
        let d = Dataset::new(Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap(), vec![None], vec![false]).unwrap();
        assert_eq!(g_smooth_jacobian(&d, 0, &cfg(0.3, 0.3), &[0.1, 0.2]).max_abs(), 0.0);
    }

    #[test]
    fn hessian_vanishes_when_expected() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let d = Dataset::complete(x, vec![0.7]).unwrap();
        assert_eq!(g_smooth_hessian_slice(&d, 0, 1, &cfg(0.5, 0.3), &[0.1, 0.2]).max_abs(), 0.0);
        // residual 0.7 − 0.5 = 0.2 outside [−h, h] for h = 0.1
        assert_eq!(g_smooth_hessian_slice(&d, 0, 0, &cfg(0.2, 0.1), &[0.1, 0.2]).max_abs(), 0.0);
    }

    #[test]
    fn smoothed_equals_raw_off_the_band() {
        let mut rng = RngStream::new(8, 0);
        for _ in 0..200 {
            let x = vec![rng.next_open01() * 4.0 - 2.0, rng.next_open01() * 4.0 - 2.0];
            let y = rng.next_open01() * 6.0 - 3.0;
            let beta = [rng.next_open01() - 0.5, rng.next_open01() - 0.5];
            let tau = rng.next_open01() * 0.9 + 0.05;
            let h = rng.next_open01() * 0.5 + 0.01;
            let d = Dataset::complete(Matrix::from_vec(1, 2, x.clone()).unwrap(), vec![y]).unwrap();
            let r = y - dot(&x, &beta);
            if r.abs() >= h {
                assert_eq!(g_smooth(&d, 0, &cfg(tau, h), &beta), g_raw(&d, 0, tau, &beta));
            }
        }
    }

    #[test]
    fn moments_examples() {
        let x = Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let c = cfg(0.5, 0.1);
        let none = Dataset::new(x.clone(), vec![None, None], vec![false, false]).unwrap();
        let m = moments(&none, &c, &[0.0]);
        assert_eq!((m.gbar[0], m.s[(0, 0)], m.j[(0, 0)]), (0.0, 0.0, 0.0));

        // ψ ≡ 1/2, so ĝ = r/2 ∈ {−1, 2}
        let d = Dataset::complete(x, vec![-2.0, 4.0]).unwrap();
        let m = moments(&d, &c, &[0.0]);
        assert_eq!(m.gbar, vec![0.5]);
        assert_eq!(m.s[(0, 0)], 2.5);

        let single = ds1(2.0, Some(1.3));
        let m = moments(&single, &cfg(0.3, 0.2), &[0.1]);
        assert_eq!(m.gbar, g_smooth(&single, 0, &cfg(0.3, 0.2), &[0.1]));
    }

    #[test]
    fn moments_scale_equivariance() {
        let mut rng = RngStream::new(21, 0);
        let n = 30;
        let xs: Vec<f64> = (0..n * 2).map(|_| rng.next_open01() * 2.0 - 1.0).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.next_open01() * 2.0 - 1.0).collect();
        let c = cfg(0.5, 0.3);
        let beta = [0.2, -0.1];
        let d = Dataset::complete(Matrix::from_vec(n, 2, xs.clone()).unwrap(), ys.clone()).unwrap();
        let k = 3.0;
        let scaled = Dataset::complete(
            Matrix::from_vec(n, 2, xs.iter().map(|v| v * k).collect()).unwrap(),
            ys,
        )
        .unwrap();
        let beta_scaled = [beta[0] / k, beta[1] / k];
        let a = moments(&d, &c, &beta);
        let b = moments(&scaled, &c, &beta_scaled);
        for q in 0..2 {
            assert!((b.gbar[q] - k * a.gbar[q]).abs() < 1e-12);
            for r in 0..2 {
                assert!((b.s[(q, r)] - k * k * a.s[(q, r)]).abs() < 1e-12);
            }
        }
        assert!(a.s.is_symmetric(0.0) && a.j.is_symmetric(0.0));
    }

    #[test]
    fn dataset_validation() {
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(Dataset::new(x.clone(), vec![None, Some(1.0)], vec![true, true]).is_err());
        assert!(Dataset::new(x.clone(), vec![Some(f64::NAN), Some(1.0)], vec![true, true]).is_err());
        assert!(Dataset::new(x.clone(), vec![Some(1.0)], vec![true]).is_err());
        let d = Dataset::new(x, vec![Some(3.0), Some(1.0)], vec![false, true]).unwrap();
        assert_eq!(d.response(0), None);
        assert_eq!(d.observed_count(), 1);
        assert!(ModelConfig::new(1.0, 0.1).is_err());
        assert!(ModelConfig::new(0.5, 0.0).is_err());
        assert!(PenaltyConfig::new(-1.0, 2.5, vec![1.0]).is_err());
        assert!(PenaltyConfig::new(0.1, 0.0, vec![1.0]).is_err());
    }
}

//! Compact-support kernels on [-1, 1] and the smoothed indicator `G_h(x) = G(x/h)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// `3/4 (1 - u²)`
    #[default]
    Epanechnikov,
    /// `15/16 (1 - u²)²`
    Quartic,
    /// `35/32 (1 - u²)³`, standing in for the "cubic" kernel family.
    Triweight,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Epanechnikov, Kernel::Quartic, Kernel::Triweight];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Quartic => "quartic",
            Kernel::Triweight => "triweight",
        }
    }

    /// Density `K(u)`.
    #[inline]
    pub fn pdf<T: Scalar>(self, u: T) -> T {
        if u.abs() >= T::one() {
            return T::zero();
        }
        let s = T::one() - u * u;
        match self {
            Kernel::Epanechnikov => T::lit(0.75) * s,
            Kernel::Quartic => T::lit(15.0 / 16.0) * s * s,
            Kernel::Triweight => T::lit(35.0 / 32.0) * s * s * s,
        }
    }

    /// Distribution function `G(u) = ∫_{v<u} K(v) dv`, as a closed-form polynomial.
    #[inline]
    pub fn cdf<T: Scalar>(self, u: T) -> T {
        if u <= -T::one() {
            return T::zero();
        }
        if u >= T::one() {
            return T::one();
        }
        let u2 = u * u;
        let half = T::lit(0.5);
        let g = match self {
            Kernel::Epanechnikov => half + T::lit(0.75) * u - T::lit(0.25) * u * u2,
            Kernel::Quartic => {
                half + T::lit(15.0 / 16.0)
                    * u
                    * (T::one() - T::lit(2.0 / 3.0) * u2 + T::lit(0.2) * u2 * u2)
            }
            Kernel::Triweight => {
                half + T::lit(35.0 / 32.0)
                    * u
                    * (T::one() - u2 + T::lit(0.6) * u2 * u2 - u2 * u2 * u2 / T::lit(7.0))
            }
        };
        g.max(T::zero()).min(T::one())
    }

    /// Derivative `K'(u)`.
    #[inline]
    pub fn pdf_derivative<T: Scalar>(self, u: T) -> T {
        if u.abs() >= T::one() {
            return T::zero();
        }
        let s = T::one() - u * u;
        match self {
            Kernel::Epanechnikov => T::lit(-1.5) * u,
            Kernel::Quartic => T::lit(-15.0 / 4.0) * u * s,
            Kernel::Triweight => T::lit(-105.0 / 16.0) * u * s * s,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "quartic" | "biweight" => Ok(Kernel::Quartic),
            "triweight" | "cubic" => Ok(Kernel::Triweight),
            other => Err(Error::InvalidConfig(format!("unknown kernel '{other}'"))),
        }
    }
}

pub fn kernel_pdf<T: Scalar>(k: Kernel, u: T) -> T {
    k.pdf(u)
}

pub fn kernel_cdf<T: Scalar>(k: Kernel, u: T) -> T {
    k.cdf(u)
}

pub fn kernel_pdf_derivative<T: Scalar>(k: Kernel, u: T) -> T {
    k.pdf_derivative(u)
}

/// `G_h(x) = G(x/h)`, a differentiable surrogate for `1{x > 0}`.
pub fn smoothed_indicator<T: Scalar>(k: Kernel, h: T, x: T) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::NonpositiveBandwidth(h.as_f64()));
    }
    Ok(k.cdf(x / h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn epanechnikov_peak_from_quadrature_normalizer() {
        let mass = simpson(|u| 1.0 - u * u, -1.0, 1.0, 2000);
        assert!((mass - 4.0 / 3.0).abs() < 1e-12);
        assert!((Kernel::Epanechnikov.pdf(0.0) - 1.0 / mass).abs() < 1e-12);
    }

    #[test]
    fn densities_vanish_outside_and_on_boundary() {
        for k in Kernel::ALL {
            for u in [1.5, -1.5, 1.0, -1.0] {
                assert_eq!(k.pdf(u), 0.0);
            }
            assert_eq!(k.pdf_derivative(2.0), 0.0);
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        for k in Kernel::ALL {
            let m = simpson(|u| k.pdf(u), -1.0, 1.0, 4000);
            assert!((m - 1.0).abs() < 1e-10, "{k}: {m}");
        }
    }

    #[test]
    fn cdf_endpoints_and_center() {
        for k in Kernel::ALL {
            assert_eq!(k.cdf(-1.0), 0.0);
            assert_eq!(k.cdf(1.0), 1.0);
            assert!((k.cdf(0.0) - 0.5f64).abs() < 1e-15);
        }
    }

    #[test]
    fn epanechnikov_cdf_at_half() {
        let oracle = simpson(|u| 0.75 * (1.0 - u * u), -1.0, 0.5, 3000);
        assert!((oracle - 0.84375).abs() < 1e-12);
        assert!((Kernel::Epanechnikov.cdf(0.5) - 0.84375f64).abs() < 1e-15);
    }

    #[test]
    fn cdf_matches_quadrature_and_is_monotone() {
        for k in Kernel::ALL {
            let mut prev = 0.0;
            for i in 0..=200 {
                let u = -1.0 + i as f64 / 100.0;
                let g = k.cdf(u);
                assert!(g >= prev);
                prev = g;
                let q = simpson(|v| k.pdf(v), -1.0, u, 2000);
                assert!((g - q).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cdf_differences_match_pdf() {
        let h = 1e-5;
        for k in Kernel::ALL {
            for i in 1..200 {
                let u = -1.0 + i as f64 / 100.0;
                let fd = (k.cdf(u + h) - k.cdf(u - h)) / (2.0 * h);
                assert!((fd - k.pdf(u)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn derivative_matches_differences() {
        let step = 1e-6;
        assert_eq!(Kernel::Epanechnikov.pdf_derivative(0.0), 0.0);
        let fd = (Kernel::Epanechnikov.pdf(0.5 + step) - Kernel::Epanechnikov.pdf(0.5 - step))
            / (2.0 * step);
        assert!((fd - -0.75_f64).abs() < 1e-8);
        assert_eq!(Kernel::Epanechnikov.pdf_derivative(0.5), -0.75);
        for k in Kernel::ALL {
            for i in 1..100 {
                let u = -0.99 + i as f64 * 0.0198;
                let fd = (k.pdf(u + step) - k.pdf(u - step)) / (2.0 * step);
                assert!((fd - k.pdf_derivative(u)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn smoothed_indicator_examples() {
        for k in Kernel::ALL {
            assert!((smoothed_indicator(k, 0.3, 0.0).unwrap() - 0.5f64).abs() < 1e-15);
            assert_eq!(smoothed_indicator(k, 0.3, 0.6).unwrap(), 1.0);
            assert_eq!(smoothed_indicator(k, 0.3, -0.3).unwrap(), 0.0);
        }
        let v = smoothed_indicator(Kernel::Epanechnikov, 0.1, 0.05).unwrap();
        assert!((v - 0.84375f64).abs() < 1e-12);
        assert!(matches!(
            smoothed_indicator(Kernel::Quartic, 0.0, 1.0),
            Err(Error::NonpositiveBandwidth(_))
        ));
        assert!(smoothed_indicator(Kernel::Quartic, -1.0, 1.0).is_err());
    }

    #[test]
    fn smoothed_indicator_limit_is_step() {
        for k in Kernel::ALL {
            for i in 0..100 {
                let x = 1e-3 * (1.0 + i as f64);
                assert_eq!(smoothed_indicator(k, 1e-6, x).unwrap(), 1.0);
                assert_eq!(smoothed_indicator(k, 1e-6, -x).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn names_roundtrip() {
        for k in Kernel::ALL {
            assert_eq!(k.name().parse::<Kernel>().unwrap(), k);
        }
        assert!("gaussian".parse::<Kernel>().is_err());
    }

    #[test]
    fn single_precision_kernels() {
        assert_eq!(Kernel::Epanechnikov.pdf(0.0f32), 0.75);
        assert!((Kernel::Quartic.cdf(0.0f32) - 0.5).abs() < 1e-7);
    }
}

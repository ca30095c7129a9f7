use expectile_el::kernels::{kernel_cdf, smoothed_indicator};
use expectile_el::model::{
    g_raw, g_smooth, g_smooth_hessian_slice, g_smooth_jacobian, moments, Dataset, ModelConfig,
};
use expectile_el::numkit::Matrix;
use expectile_el::Kernel;
use proptest::prelude::*;

fn kernel() -> impl Strategy<Value = Kernel> {
    prop_oneof![Just(Kernel::Epanechnikov), Just(Kernel::Quartic), Just(Kernel::Triweight)]
}

fn one_row(x: &[f64], y: f64) -> Dataset<f64> {
    Dataset::complete(Matrix::from_vec(1, x.len(), x.to_vec()).unwrap(), vec![y]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cdf_is_nondecreasing(k in kernel(), a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(kernel_cdf(k, lo) <= kernel_cdf(k, hi));
    }

    #[test]
    fn indicator_limit(k in kernel(), x in 1e-3f64..10.0, neg in any::<bool>()) {
        let x = if neg { -x } else { x };
        let g = smoothed_indicator(k, 1e-6, x).unwrap();
        prop_assert_eq!(g, if x > 0.0 { 1.0 } else { 0.0 });
    }

    #[test]
    fn saturated_smoother_equals_raw(
        k in kernel(), tau in 0.05f64..0.95, h in 0.05f64..1.0,
        x in prop::collection::vec(-2.0f64..2.0, 3), beta in prop::collection::vec(-1.0f64..1.0, 3),
        excess in 0.0f64..3.0, above in any::<bool>(),
    ) {
        let fit: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
        let r = if above { h + excess } else { -(h + excess) };
        let ds = one_row(&x, fit + r);
        let cfg = ModelConfig::new(tau, h).unwrap().with_kernel(k);
        let s = g_smooth(&ds, 0, &cfg, &beta);
        let raw = g_raw(&ds, 0, tau, &beta);
        for (a, b) in s.iter().zip(&raw) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn jacobian_matches_differences(
        k in kernel(), tau in 0.05f64..0.95, h in 0.1f64..1.0,
        x in prop::collection::vec(-2.0f64..2.0, 3), beta in prop::collection::vec(-1.0f64..1.0, 3),
        r in -1.5f64..1.5,
    ) {
        let fit: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
        let ds = one_row(&x, fit + r * h);
        let cfg = ModelConfig::new(tau, h).unwrap().with_kernel(k);
        let jac = g_smooth_jacobian(&ds, 0, &cfg, &beta);
        let eps = 1e-6;
        for c in 0..3 {
            let mut up = beta.clone();
            let mut dn = beta.clone();
            up[c] += eps;
            dn[c] -= eps;
            let gu = g_smooth(&ds, 0, &cfg, &up);
            let gd = g_smooth(&ds, 0, &cfg, &dn);
            for row in 0..3 {
                let fd = (gu[row] - gd[row]) / (2.0 * eps);
                prop_assert!((fd - jac[(row, c)]).abs() <= 1e-5 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn hessian_slice_matches_differences(
        k in kernel(), tau in 0.05f64..0.95, h in 0.1f64..1.0,
        x in prop::collection::vec(-2.0f64..2.0, 3), beta in prop::collection::vec(-1.0f64..1.0, 3),
        r in -0.95f64..0.95, j in 0usize..3,
    ) {
        // K' jumps at the support boundary for the Epanechnikov kernel, so stay inside it
        let fit: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
        let ds = one_row(&x, fit + r * h);
        let cfg = ModelConfig::new(tau, h).unwrap().with_kernel(k);
        let hs = g_smooth_hessian_slice(&ds, 0, j, &cfg, &beta);
        let eps = 1e-5;
        for c in 0..3 {
            let mut up = beta.clone();
            let mut dn = beta.clone();
            up[c] += eps;
            dn[c] -= eps;
            let ju = g_smooth_jacobian(&ds, 0, &cfg, &up);
            let jd = g_smooth_jacobian(&ds, 0, &cfg, &dn);
            for l in 0..3 {
                let fd = (ju[(j, l)] - jd[(j, l)]) / (2.0 * eps);
                prop_assert!((fd - hs[(c, l)]).abs() <= 1e-4 * (1.0 + fd.abs()), "fd {} vs {}", fd, hs[(c, l)]);
            }
        }
    }

    #[test]
    fn moments_scale_with_covariates(
        seed in 0u64..1000, c in 0.1f64..10.0,
    ) {
        let mut rng = expectile_el::numkit::RngStream::new(seed, 0);
        let n = 20;
        let xs: Vec<f64> = (0..n * 2).map(|_| expectile_el::numkit::draw_normal(&mut rng)).collect();
        let ys: Vec<f64> = (0..n).map(|_| expectile_el::numkit::draw_normal(&mut rng)).collect();
        let ds = Dataset::complete(Matrix::from_vec(n, 2, xs.clone()).unwrap(), ys.clone()).unwrap();
        let sx: Vec<f64> = xs.iter().map(|v| v * c).collect();
        let dsc = Dataset::complete(Matrix::from_vec(n, 2, sx).unwrap(), ys).unwrap();
        let cfg = ModelConfig::new(0.3, 0.4).unwrap();
        let beta = [0.2, -0.4];
        let scaled_beta = [0.2 / c, -0.4 / c];
        let a = moments(&ds, &cfg, &beta);
        let b = moments(&dsc, &cfg, &scaled_beta);
        for j in 0..2 {
            prop_assert!((b.gbar[j] - c * a.gbar[j]).abs() <= 1e-10 * (1.0 + (c * a.gbar[j]).abs()));
            for l in 0..2 {
                prop_assert!((b.s[(j, l)] - c * c * a.s[(j, l)]).abs() <= 1e-10 * (1.0 + (c * c * a.s[(j, l)]).abs()));
            }
        }
    }
}

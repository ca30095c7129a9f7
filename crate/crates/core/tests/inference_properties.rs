mod common;

use common::{permuted, random_dataset, scaled};
use expectile_el::inference::{bic_value, empirical_tau, wilks_test, zero_expectile_tau, bic_sweep};
use expectile_el::model::ModelConfig;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wilks_statistic_invariances(seed in any::<u64>(), n in 20usize..80, p in 1usize..4, c in 0.1f64..10.0) {
        let (ds, beta) = random_dataset(seed, n, p, 0.1);
        let cfg = ModelConfig::new(0.4, 0.5).unwrap();
        let b: Vec<f64> = beta.iter().map(|v| v + 0.1).collect();
        let Ok(base) = wilks_test(&ds, &cfg, &b, p as u32, 0.05) else { return Ok(()) };
        let perm = wilks_test(&permuted(&ds, seed), &cfg, &b, p as u32, 0.05).unwrap();
        prop_assert!((base.statistic - perm.statistic).abs() <= 1e-8 * (1.0 + base.statistic));
        let bs: Vec<f64> = b.iter().map(|v| v / c).collect();
        let sc = wilks_test(&scaled(&ds, c), &cfg, &bs, p as u32, 0.05).unwrap();
        prop_assert!((base.statistic - sc.statistic).abs() <= 1e-7 * (1.0 + base.statistic));
        prop_assert_eq!(base.reject, base.statistic > base.critical);
    }

    #[test]
    fn bic_grows_with_model_size(ratio in 0.0f64..100.0, n in 2usize..10_000, k in 0usize..50) {
        prop_assert!(bic_value(ratio, n, k + 1) > bic_value(ratio, n, k));
    }

    #[test]
    fn empirical_tau_in_unit_interval(y in prop::collection::vec(-100.0f64..100.0, 2..60)) {
        if let Ok(t) = empirical_tau(&y) {
            prop_assert!((0.0..=1.0).contains(&t));
        }
    }

    #[test]
    fn empirical_tau_symmetric_sample(half in prop::collection::vec(0.01f64..50.0, 1..30), centre in -10.0f64..10.0) {
        let mut y: Vec<f64> = half.iter().map(|v| centre + v).collect();
        y.extend(half.iter().map(|v| centre - v));
        prop_assert!((empirical_tau(&y).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_expectile_tau_solves_moment(
        pos in prop::collection::vec(0.001f64..100.0, 1..40),
        neg in prop::collection::vec(0.001f64..100.0, 1..40),
    ) {
        let mut e = pos.clone();
        e.extend(neg.iter().map(|v| -v));
        let tau = zero_expectile_tau(&e).unwrap();
        let m: f64 = e
            .iter()
            .map(|&v| v * if v > 0.0 { tau } else { 1.0 - tau })
            .sum::<f64>()
            / e.len() as f64;
        prop_assert!(m.abs() <= 1e-12);
    }
}

#[test]
fn sweep_single_point_and_duplicates() {
    let (ds, _) = random_dataset(11, 150, 3, 0.0);
    let cfg = ModelConfig::new(0.5, 0.4).unwrap();
    let one = bic_sweep(&ds, &cfg, 2.5, &[0.0]).unwrap();
    assert_eq!(one.records.len(), 1);
    assert_eq!(one.best, one.records[0]);
    assert_eq!(one.best.active_set, vec![0, 1, 2]);
    let dup = bic_sweep(&ds, &cfg, 2.5, &[0.05, 0.05, 0.01]).unwrap();
    assert_eq!(dup.records[0], dup.records[1]);
    let s = bic_sweep(&ds, &cfg, 2.5, &[0.01, 0.02, 0.05, 0.1]).unwrap();
    let min = s.records.iter().map(|r| r.bic).fold(f64::INFINITY, f64::min);
    assert_eq!(s.best.bic, min);
}

use expectile_el::estimators::Algorithm;
use expectile_el::inference::bic_sweep_with_pilot;
use expectile_el::estimators::fit_a2;
use expectile_el::simulate::{
    beta_sparse, generate_replication, generate_replication_pair, run_monte_carlo, run_monte_carlo_with_threads, Design, ErrorLaw,
    Missingness, SimConfig,
};

fn table1(n: usize, reps: usize) -> SimConfig {
    let mut sc = SimConfig::new(n, beta_sparse(5, false), Design::D1, ErrorLaw::ShiftedExp, Missingness::Complete);
    sc.reps = reps;
    sc.seed = 20;
    sc
}

#[test]
fn report_is_a_function_of_the_config() {
    let mut sc = table1(100, 12);
    sc.missing = Missingness::CovariatePi;
    let a = run_monte_carlo_with_threads(&sc, 1).unwrap();
    let b = run_monte_carlo_with_threads(&sc, 4).unwrap();
    let c = run_monte_carlo(&sc).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
    let other = run_monte_carlo(&SimConfig { seed: 21, ..sc }).unwrap();
    assert_ne!(a.cp + a.algorithms[0].mean_error_norm, other.cp + other.algorithms[0].mean_error_norm);
}

#[test]
fn error_norm_shrinks_with_sample_size() {
    let norms: Vec<f64> = [100, 500, 1000]
        .iter()
        .map(|&n| {
            let mut sc = table1(n, 200);
            sc.algorithms = vec![Algorithm::A2];
            run_monte_carlo(&sc).unwrap().algorithms[0].mean_error_norm
        })
        .collect();
    assert!(norms[0] > norms[1] && norms[1] > norms[2], "{norms:?}");
}

#[test]
fn rates_are_probabilities() {
    let mut sc = table1(100, 30);
    sc.missing = Missingness::ConstantPi(0.8);
    let r = run_monte_carlo(&sc).unwrap();
    assert!((0.0..=1.0).contains(&r.cp));
    assert!((0.0..=1.0).contains(&r.cp_exact));
    for s in &r.algorithms {
        assert!((0.0..=1.0).contains(&s.coverage));
        for v in [s.zero_selection_rate, s.nonzero_selection_rate, s.support_recovery].into_iter().flatten() {
            assert!((0.0..=1.0).contains(&v));
        }
    }
}

#[test]
fn bic_recovers_sparse_support() {
    let sc = table1(500, 1);
    let support = sc.true_support();
    let cfg = sc.model_config().unwrap();
    let grid: Vec<f64> = (1..=8).map(|a| a as f64 * 500f64.powf(-5.0 / 6.0)).collect();
    let seeds = 50;
    let mut hits = 0;
    for m in 0..seeds {
        let (main, pilot_rep) = generate_replication_pair(&sc, m).unwrap();
        let pilot = fit_a2(&pilot_rep.dataset, &cfg, None).unwrap().beta;
        let s = bic_sweep_with_pilot(&main.dataset, &cfg, sc.gamma, &pilot, &grid).unwrap();
        if s.best.active_set == support {
            hits += 1;
        }
    }
    let rate = hits as f64 / seeds as f64;
    assert!(rate >= 0.9, "support recovered in {rate} of seeds");
}

#[test]
fn exact_ratio_converges_when_rounding_stalls_newton() {
    let mut sc = SimConfig::new(100, beta_sparse(5, false), Design::D1, ErrorLaw::ShiftedExp, Missingness::Complete);
    sc.seed = 1;
    let cfg = sc.model_config().unwrap();
    for m in [219, 445, 854] {
        let rep = generate_replication(&sc, m).unwrap();
        let st = expectile_el::el::solve_lambda_exact(&rep.dataset, &cfg, &sc.beta0).unwrap();
        let n = rep.dataset.n() as f64;
        let mut resid = [0.0; 5];
        for i in 0..rep.dataset.n() {
            let g = expectile_el::model::g_smooth(&rep.dataset, i, &cfg, &sc.beta0);
            let z = 1.0 + st.lambda.iter().zip(&g).map(|(l, v)| l * v).sum::<f64>();
            for j in 0..5 {
                resid[j] += g[j] / z / n;
            }
        }
        assert!(resid.iter().map(|r| r * r).sum::<f64>().sqrt() <= 1e-8);
    }
}

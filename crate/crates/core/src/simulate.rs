//! Data generators and the Monte Carlo harness.
//!
//! Every replication `m` draws from its own stream `RngStream::new(seed, m)`,
//! and replications are merged in index order, so a report depends on the
//! configuration alone and never on the worker count.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::el::{el_ratio_approx, el_ratio_profile};
use crate::estimators::{fit, fit_a2, Algorithm, FitResult};
use crate::inference::{submodel_wilks_test, zero_expectile_tau};
use crate::model::{default_bandwidth, default_eta, Dataset, ModelConfig, PenaltyConfig};
use crate::numkit::{chi2_quantile, dot, draw_chi2_1, draw_exponential, draw_normal, norm, Matrix, RngStream};
use crate::{Error, Kernel, Result};

/// Mean of the exponential part of the shifted-exponential error law.
pub const EXP_MEAN: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Design {
    /// i.i.d. standard normal covariates.
    D1,
    /// Column j (1-based) is χ²(1) + j²/n, except column 3 which is standard normal.
    D2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorLaw {
    StdNormal,
    /// `E − 1.5` with `E` exponential of mean 1.5.
    ShiftedExp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Missingness {
    Complete,
    ConstantPi(f64),
    CovariatePi,
}

macro_rules! display_via_name {
    ($t:ty, $($v:pat => $s:expr),+ $(,)?) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self { $($v => write!(f, "{}", $s)),+ }
            }
        }
    };
}

display_via_name!(Design, Design::D1 => "D1", Design::D2 => "D2");
display_via_name!(ErrorLaw, ErrorLaw::StdNormal => "normal", ErrorLaw::ShiftedExp => "exp");
display_via_name!(
    Missingness,
    Missingness::Complete => "complete".to_string(),
    Missingness::ConstantPi(p) => format!("pi={p}"),
    Missingness::CovariatePi => "pi(x)".to_string(),
);

impl FromStr for Design {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "d1" => Ok(Design::D1),
            "d2" => Ok(Design::D2),
            other => Err(Error::InvalidConfig(format!("unknown design '{other}'"))),
        }
    }
}

impl FromStr for ErrorLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "std_normal" => Ok(ErrorLaw::StdNormal),
            "exp" | "shifted_exp" => Ok(ErrorLaw::ShiftedExp),
            other => Err(Error::InvalidConfig(format!("unknown error law '{other}'"))),
        }
    }
}

pub fn gen_design(design: Design, n: usize, p: usize, rng: &mut RngStream) -> Matrix<f64> {
    let mut x = Matrix::zeros(n, p);
    for j in 0..p {
        let shift = ((j + 1) * (j + 1)) as f64 / n as f64;
        for i in 0..n {
            x[(i, j)] = match design {
                Design::D2 if j != 2 => draw_chi2_1(rng) + shift,
                _ => draw_normal(rng),
            };
        }
    }
    x
}

pub fn gen_errors(law: ErrorLaw, n: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..n)
        .map(|_| match law {
            ErrorLaw::StdNormal => draw_normal(rng),
            ErrorLaw::ShiftedExp => draw_exponential(rng, EXP_MEAN) - EXP_MEAN,
        })
        .collect()
}

/// Per-entry response probability of the covariate-dependent mechanism.
pub fn covariate_pi_cell(x: f64) -> f64 {
    let d = (x - 1.0).abs();
    if d <= 1.0 {
        0.8 + 0.2 * d
    } else {
        0.95
    }
}

/// Response probability of row `i` under `mechanism`.
pub fn response_probability(mechanism: Missingness, xrow: &[f64]) -> f64 {
    match mechanism {
        Missingness::Complete => 1.0,
        Missingness::ConstantPi(p) => p,
        Missingness::CovariatePi => xrow.iter().map(|&v| covariate_pi_cell(v)).sum::<f64>() / xrow.len() as f64,
    }
}

pub fn gen_missing(mechanism: Missingness, x: &Matrix<f64>, rng: &mut RngStream) -> Vec<bool> {
    match mechanism {
        Missingness::Complete => vec![true; x.rows()],
        _ => (0..x.rows())
            .map(|i| rng.bernoulli(response_probability(mechanism, x.row(i))))
            .collect(),
    }
}

/// τ making the error law's τ-expectile zero: 0.5 for normal errors, and an
/// estimate from 10⁶ draws of a dedicated stream for shifted-exponential ones.
pub fn default_tau(law: ErrorLaw) -> f64 {
    static EXP_TAU: OnceLock<f64> = OnceLock::new();
    match law {
        ErrorLaw::StdNormal => 0.5,
        ErrorLaw::ShiftedExp => *EXP_TAU.get_or_init(|| {
            let mut rng = RngStream::new(0, u64::MAX);
            let e = gen_errors(ErrorLaw::ShiftedExp, 1_000_000, &mut rng);
            zero_expectile_tau(&e).expect("two-sided sample")
        }),
    }
}

/// `β⁰` with `β₃ = 1`, `β₅ = 2` and optionally `β₇ = −1`, zero elsewhere (1-based).
pub fn beta_sparse(p: usize, with_seventh: bool) -> Vec<f64> {
    let mut b = vec![0.0; p];
    for (j, v) in [(3, 1.0), (5, 2.0)] {
        if j <= p {
            b[j - 1] = v;
        }
    }
    if with_seventh && p >= 7 {
        b[6] = -1.0;
    }
    b
}

/// As [`beta_sparse`] with `β₃ = 2`, `β₅ = 1`.
pub fn beta_sparse_swapped(p: usize, with_seventh: bool) -> Vec<f64> {
    let mut b = beta_sparse(p, with_seventh);
    if p >= 5 {
        b.swap(2, 4);
    }
    b
}

/// All-nonzero `β⁰`: `β₃ = 1`, `β₅ = 2`, 1 elsewhere.
pub fn beta_dense(p: usize) -> Vec<f64> {
    let mut b = vec![1.0; p];
    if p >= 5 {
        b[4] = 2.0;
    }
    b
}

/// Source of the pilot estimate behind the adaptive weights in a replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimPilot {
    /// A2 fit on a second dataset of the same size, drawn from the
    /// replication's stream after the main dataset.
    #[default]
    Independent,
    /// A2 fit on the replication's own dataset.
    Same,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub label: String,
    pub n: usize,
    pub p: usize,
    pub beta0: Vec<f64>,
    pub design: Design,
    pub errors: ErrorLaw,
    pub missing: Missingness,
    pub tau: f64,
    pub h: f64,
    pub eta: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub nu: f64,
    pub eps_zero: f64,
    pub kernel: Kernel,
    pub reps: usize,
    pub algorithms: Vec<Algorithm>,
    pub pilot: SimPilot,
    pub seed: u64,
}

impl SimConfig {
    /// Defaults: `τ` from the error law, `h = n^{-1/4}`, `η = n^{-5/6}`,
    /// `γ = 2.5`, `α = 0.05`, `ν = 10⁻²`, 200 replications, all algorithms.
    pub fn new(n: usize, beta0: Vec<f64>, design: Design, errors: ErrorLaw, missing: Missingness) -> Self {
        SimConfig {
            label: String::new(),
            n,
            p: beta0.len(),
            beta0,
            design,
            errors,
            missing,
            tau: default_tau(errors),
            h: default_bandwidth(n),
            eta: default_eta(n),
            gamma: 2.5,
            alpha: 0.05,
            nu: 1e-2,
            eps_zero: 1e-4,
            kernel: Kernel::default(),
            reps: 200,
            algorithms: Algorithm::ALL.to_vec(),
            pilot: SimPilot::Independent,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n <= self.p {
            return Err(Error::InvalidConfig(format!("need n > p >= 1, got n={}, p={}", self.n, self.p)));
        }
        if self.beta0.len() != self.p {
            return Err(Error::DimensionMismatch(format!(
                "beta0 has length {}, expected {}",
                self.beta0.len(),
                self.p
            )));
        }
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms requested".into()));
        }
        if let Missingness::ConstantPi(pi) = self.missing {
            if !(pi > 0.0 && pi <= 1.0) {
                return Err(Error::InvalidProbability(pi));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidProbability(self.alpha));
        }
        if !(self.eta >= 0.0) || !(self.gamma > 0.0) {
            return Err(Error::InvalidConfig("eta must be >= 0 and gamma > 0".into()));
        }
        self.model_config().map(|_| ())
    }

    pub fn model_config(&self) -> Result<ModelConfig<f64>> {
        let cfg = ModelConfig::new(self.tau, self.h)?
            .with_kernel(self.kernel)
            .with_nu(self.nu)
            .with_eps_zero(self.eps_zero);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Indices of the nonzero entries of `β⁰`.
    pub fn true_support(&self) -> Vec<usize> {
        (0..self.p).filter(|&j| self.beta0[j] != 0.0).collect()
    }
}

/// One generated replication: the dataset (responses masked by `δ`), the full
/// response vector and the errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub dataset: Dataset<f64>,
    pub y_full: Vec<f64>,
    pub errors: Vec<f64>,
}

fn draw_dataset(sc: &SimConfig, rng: &mut RngStream) -> Result<Replication> {
    let x = gen_design(sc.design, sc.n, sc.p, rng);
    let errors = gen_errors(sc.errors, sc.n, rng);
    let delta = gen_missing(sc.missing, &x, rng);
    let y_full: Vec<f64> = (0..sc.n).map(|i| dot(x.row(i), &sc.beta0) + errors[i]).collect();
    let y = y_full.iter().zip(&delta).map(|(&v, &d)| d.then_some(v)).collect();
    Ok(Replication {
        dataset: Dataset::new(x, y, delta)?,
        y_full,
        errors,
    })
}

pub fn generate_replication(sc: &SimConfig, m: u64) -> Result<Replication> {
    draw_dataset(sc, &mut RngStream::new(sc.seed, m))
}

/// The main dataset of replication `m` followed by the independent pilot
/// dataset drawn from the same stream.
pub fn generate_replication_pair(sc: &SimConfig, m: u64) -> Result<(Replication, Replication)> {
    let mut rng = RngStream::new(sc.seed, m);
    let main = draw_dataset(sc, &mut rng)?;
    let pilot = draw_dataset(sc, &mut rng)?;
    Ok((main, pilot))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmOutcome {
    pub algorithm: Algorithm,
    pub error_norm: f64,
    pub covered: bool,
    pub active_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationRecord {
    pub index: u64,
    /// Quadratic EL statistic at `β⁰`.
    pub stat_at_truth: f64,
    pub truth_covered: bool,
    /// Exact EL statistic at `β⁰`; `+∞` when zero leaves the convex hull.
    pub exact_stat_at_truth: f64,
    pub exact_truth_covered: bool,
    pub outcomes: Vec<AlgorithmOutcome>,
}

/// Fits every requested algorithm on replication `m`. Penalized fits take
/// their pilot from an A2 fit chosen by `sc.pilot`.
pub fn run_replication(sc: &SimConfig, m: u64) -> Result<ReplicationRecord> {
    let needs_pilot = sc.algorithms.iter().any(|a| a.is_penalized());
    let (rep, pilot_rep) = if needs_pilot && sc.pilot == SimPilot::Independent {
        let (a, b) = generate_replication_pair(sc, m)?;
        (a, Some(b))
    } else {
        (generate_replication(sc, m)?, None)
    };
    let ds = &rep.dataset;
    let cfg = sc.model_config()?;
    let critical = chi2_quantile(1.0 - sc.alpha, sc.p as u32)?;
    let stat_at_truth = el_ratio_approx(ds, &cfg, &sc.beta0)?;
    let exact_stat_at_truth = el_ratio_profile(ds, &cfg, &sc.beta0)?;
    let mut a2: Option<FitResult<f64>> = None;
    let mut pilot: Option<Vec<f64>> = match &pilot_rep {
        Some(r) => Some(fit_a2(&r.dataset, &cfg, None)?.beta),
        None => None,
    };
    let mut outcomes = Vec::with_capacity(sc.algorithms.len());
    for &algorithm in &sc.algorithms {
        let result = if algorithm.is_penalized() {
            if pilot.is_none() {
                let own = match &a2 {
                    Some(f) => f.beta.clone(),
                    None => fit_a2(ds, &cfg, None)?.beta,
                };
                pilot = Some(own);
            }
            let pen = PenaltyConfig::new(sc.eta, sc.gamma, pilot.clone().unwrap_or_default())?;
            fit(algorithm, ds, &cfg, Some(&pen), None)?
        } else {
            let r = fit(algorithm, ds, &cfg, None, None)?;
            if algorithm == Algorithm::A2 {
                a2 = Some(r.clone());
            }
            r
        };
        let covered = if algorithm.is_penalized() {
            match submodel_wilks_test(ds, &cfg, &result.beta, sc.alpha) {
                Ok(t) => !t.reject,
                Err(Error::EmptyActiveSet) => false,
                Err(e) => return Err(e),
            }
        } else {
            el_ratio_approx(ds, &cfg, &result.beta)? <= critical
        };
        let diff: Vec<f64> = result.beta.iter().zip(&sc.beta0).map(|(a, b)| a - b).collect();
        outcomes.push(AlgorithmOutcome {
            algorithm,
            error_norm: norm(&diff),
            covered,
            active_set: result.active_set,
        });
    }
    Ok(ReplicationRecord {
        index: m,
        stat_at_truth,
        truth_covered: stat_at_truth <= critical,
        exact_stat_at_truth,
        exact_truth_covered: exact_stat_at_truth <= critical,
        outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub mean_error_norm: f64,
    /// Share of replications whose estimate lies in its own confidence region.
    pub coverage: f64,
    /// `|Âᶜ ∩ Aᶜ| / |Aᶜ|` averaged; `None` when `Aᶜ` is empty or the algorithm is unpenalized.
    pub zero_selection_rate: Option<f64>,
    /// `|Â ∩ A| / |A|` averaged; `None` for unpenalized algorithms.
    pub nonzero_selection_rate: Option<f64>,
    /// Share of replications with `Â = A` exactly; `None` for unpenalized algorithms.
    pub support_recovery: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationFailure {
    pub index: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub completed: usize,
    pub failures: Vec<ReplicationFailure>,
    /// Coverage probability of the region around `β⁰` built from the
    /// quadratic statistic (df = p).
    pub cp: f64,
    /// The same with the exact EL statistic.
    pub cp_exact: f64,
    pub algorithms: Vec<AlgorithmSummary>,
}

/// Aggregates replication results in index order.
pub fn summarize(sc: &SimConfig, results: Vec<Result<ReplicationRecord>>) -> Result<SimReport> {
    let total = results.len();
    let mut records = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for (m, r) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push(ReplicationFailure {
                index: m as u64,
                error: e.to_string(),
            }),
        }
    }
    if failures.len() * 10 > total || records.is_empty() {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total,
        });
    }
    let count = records.len() as f64;
    let support = sc.true_support();
    let null_count = sc.p - support.len();
    let cp = records.iter().filter(|r| r.truth_covered).count() as f64 / count;
    let cp_exact = records.iter().filter(|r| r.exact_truth_covered).count() as f64 / count;
    let algorithms = sc
        .algorithms
        .iter()
        .enumerate()
        .map(|(k, &algorithm)| {
            let outs = records.iter().map(|r| &r.outcomes[k]);
            let mean_error_norm = outs.clone().map(|o| o.error_norm).sum::<f64>() / count;
            let coverage = outs.clone().filter(|o| o.covered).count() as f64 / count;
            let (mut zero, mut nonzero, mut exact) = (0.0, 0.0, 0.0);
            for o in outs {
                let hits = o.active_set.iter().filter(|j| support.contains(j)).count();
                let false_pos = o.active_set.len() - hits;
                if null_count > 0 {
                    zero += (null_count - false_pos) as f64 / null_count as f64;
                }
                if !support.is_empty() {
                    nonzero += hits as f64 / support.len() as f64;
                }
                if o.active_set == support {
                    exact += 1.0;
                }
            }
            let penalized = algorithm.is_penalized();
            AlgorithmSummary {
                algorithm,
                mean_error_norm,
                coverage,
                zero_selection_rate: (penalized && null_count > 0).then_some(zero / count),
                nonzero_selection_rate: (penalized && !support.is_empty()).then_some(nonzero / count),
                support_recovery: penalized.then_some(exact / count),
            }
        })
        .collect();
    Ok(SimReport {
        config: sc.clone(),
        completed: records.len(),
        failures,
        cp,
        cp_exact,
        algorithms,
    })
}

/// Runs all replications on the current rayon pool, in order.
pub fn run_replications(sc: &SimConfig) -> Result<Vec<Result<ReplicationRecord>>> {
    sc.validate()?;
    Ok((0..sc.reps as u64)
        .into_par_iter()
        .map(|m| run_replication(sc, m))
        .collect())
}

pub fn run_monte_carlo(sc: &SimConfig) -> Result<SimReport> {
    let results = run_replications(sc)?;
    summarize(sc, results)
}

/// As [`run_monte_carlo`] on a dedicated pool of `threads` workers.
pub fn run_monte_carlo_with_threads(sc: &SimConfig, threads: usize) -> Result<SimReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| run_monte_carlo(sc))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| x.to_string())
}

impl SimReport {
    /// Header for [`SimReport::csv_record`]; metric columns exist for all four
    /// algorithms and stay empty for those not run.
    pub fn csv_header() -> Vec<String> {
        let mut h: Vec<String> = [
            "label", "n", "p", "design", "errors", "missing", "tau", "h", "eta", "seed", "reps", "completed", "failed",
            "cp", "cp_exact",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for a in Algorithm::ALL {
            for metric in ["norm", "coverage", "zero_rate", "nonzero_rate", "support"] {
                h.push(format!("{metric}_{a}"));
            }
        }
        h
    }

    pub fn csv_record(&self) -> Vec<String> {
        let c = &self.config;
        let mut r = vec![
            c.label.clone(),
            c.n.to_string(),
            c.p.to_string(),
            c.design.to_string(),
            c.errors.to_string(),
            c.missing.to_string(),
            c.tau.to_string(),
            c.h.to_string(),
            c.eta.to_string(),
            c.seed.to_string(),
            c.reps.to_string(),
            self.completed.to_string(),
            self.failures.len().to_string(),
            self.cp.to_string(),
            self.cp_exact.to_string(),
        ];
        for a in Algorithm::ALL {
            match self.algorithms.iter().find(|s| s.algorithm == a) {
                Some(s) => r.extend([
                    s.mean_error_norm.to_string(),
                    s.coverage.to_string(),
                    fmt_opt(s.zero_selection_rate),
                    fmt_opt(s.nonzero_selection_rate),
                    fmt_opt(s.support_recovery),
                ]),
                None => r.extend(std::iter::repeat_n(String::new(), 5)),
            }
        }
        r
    }

    pub fn summary(&self, algorithm: Algorithm) -> Option<&AlgorithmSummary> {
        self.algorithms.iter().find(|s| s.algorithm == algorithm)
    }
}

/// Named simulation grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Sparse `β⁰`, complete data: errors × design × p ∈ {5, 10} × n ∈ {100, 500, 1000}.
    Table1,
    /// Sparse `β⁰` with `β₃ = 2`, `β₅ = 1`, otherwise as [`Preset::Table1`].
    Table1Swapped,
    /// All coefficients nonzero, shifted-exponential errors, p ∈ {5, 10}, n ∈ {100, 500}, A2 and L2.
    Table2,
    /// p = 10 with `β₇ = −1`, D2, shifted-exponential errors, three missingness
    /// mechanisms over n ∈ {100, 250, 500, 1000, 2000}, A2 and L2.
    FigCoverage,
    /// As [`Preset::FigCoverage`] at n = 1000 over h ∈ {0.10, 0.15, …, 0.35}.
    FigSelection,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "table1" => Ok(Preset::Table1),
            "table1-swapped" => Ok(Preset::Table1Swapped),
            "table2" => Ok(Preset::Table2),
            "fig-coverage" => Ok(Preset::FigCoverage),
            "fig-selection" => Ok(Preset::FigSelection),
            other => Err(Error::InvalidConfig(format!("unknown preset '{other}'"))),
        }
    }
}

impl Preset {
    pub fn cells(self, reps: usize, seed: u64) -> Vec<SimConfig> {
        let mut out = Vec::new();
        let mut push = |mut sc: SimConfig, label: String| {
            sc.reps = reps;
            sc.seed = seed;
            sc.label = label;
            out.push(sc);
        };
        match self {
            Preset::Table1 | Preset::Table1Swapped => {
                for errors in [ErrorLaw::ShiftedExp, ErrorLaw::StdNormal] {
                    for design in [Design::D1, Design::D2] {
                        for p in [5, 10] {
                            for n in [100, 500, 1000] {
                                let beta = if self == Preset::Table1 {
                                    beta_sparse(p, false)
                                } else {
                                    beta_sparse_swapped(p, false)
                                };
                                let sc = SimConfig::new(n, beta, design, errors, Missingness::Complete);
                                push(sc, format!("{errors}-{design}-p{p}-n{n}"));
                            }
                        }
                    }
                }
            }
            Preset::Table2 => {
                for design in [Design::D1, Design::D2] {
                    for p in [5, 10] {
                        for n in [100, 500] {
                            let mut sc =
                                SimConfig::new(n, beta_dense(p), design, ErrorLaw::ShiftedExp, Missingness::Complete);
                            sc.algorithms = vec![Algorithm::A2, Algorithm::L2];
                            push(sc, format!("{design}-p{p}-n{n}"));
                        }
                    }
                }
            }
            Preset::FigCoverage | Preset::FigSelection => {
                let mechanisms = [Missingness::Complete, Missingness::ConstantPi(0.8), Missingness::CovariatePi];
                let grid: Vec<(usize, Option<f64>)> = if self == Preset::FigCoverage {
                    [100, 250, 500, 1000, 2000].iter().map(|&n| (n, None)).collect()
                } else {
                    [0.10, 0.15, 0.20, 0.25, 0.30, 0.35].iter().map(|&h| (1000, Some(h))).collect()
                };
                for missing in mechanisms {
                    for &(n, h) in &grid {
                        let mut sc = SimConfig::new(n, beta_sparse(10, true), Design::D2, ErrorLaw::ShiftedExp, missing);
                        sc.algorithms = vec![Algorithm::A2, Algorithm::L2];
                        if let Some(h) = h {
                            sc.h = h;
                        }
                        push(sc, format!("{missing}-n{n}-h{}", sc_h(n, h)));
                    }
                }
            }
        }
        out
    }
}

fn sc_h(n: usize, h: Option<f64>) -> String {
    format!("{:.4}", h.unwrap_or_else(|| default_bandwidth::<f64>(n)))
}

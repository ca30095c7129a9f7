use std::path::{Path, PathBuf};

use expectile_el::el::{el_ratio_approx, el_ratio_profile};
use expectile_el::estimators::{fit, Algorithm, FitResult, PilotMode};
use expectile_el::inference::{
    bic_sweep_with_pilot, empirical_tau, submodel_wilks_test, wilks_test, BicRecord, TestReport,
};
use expectile_el::model::{default_bandwidth, default_eta, Dataset, ModelConfig, PenaltyConfig};
use expectile_el::simulate::{
    beta_sparse, generate_replication, run_monte_carlo, run_monte_carlo_with_threads, Design, ErrorLaw,
    Missingness, Preset, SimConfig, SimPilot, SimReport,
};
use expectile_el::Kernel;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::data::{load_dataset, standardize, write_dataset, LoadedData, Standardization};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// What a command produced: the JSON report and any files written.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub files: Vec<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Usage(format!("{what}: cannot parse '{t}'"))))
        .collect()
}

struct Prepared {
    ds: Dataset<f64>,
    columns: Vec<String>,
    cfg: ModelConfig<f64>,
    tau_source: &'static str,
    standardization: Option<Standardization>,
}

fn prepare(input: &Path, m: &ModelArgs) -> Result<Prepared, CliError> {
    let LoadedData { dataset, columns } = load_dataset(input)?;
    let (ds, standardization) = if m.standardize {
        let (s, t) = standardize(&dataset)?;
        (s, Some(t))
    } else {
        (dataset, None)
    };
    let (tau, tau_source) = if m.tau.trim().eq_ignore_ascii_case("auto") {
        (empirical_tau(&ds.observed_responses())?, "empirical")
    } else {
        let t: f64 = m
            .tau
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--tau '{}' is neither a number nor 'auto'", m.tau)))?;
        (t, "fixed")
    };
    let kernel: Kernel = m.kernel.parse()?;
    let h = m.h.unwrap_or_else(|| default_bandwidth(ds.n()));
    let cfg = ModelConfig::new(tau, h)?
        .with_kernel(kernel)
        .with_nu(m.nu)
        .with_eps_zero(m.eps_zero)
        .with_max_iter(m.max_iter);
    cfg.validate()?;
    Ok(Prepared {
        ds,
        columns,
        cfg,
        tau_source,
        standardization,
    })
}

fn model_json(p: &Prepared, input: &Path) -> Value {
    json!({
        "input": input.display().to_string(),
        "n": p.ds.n(),
        "p": p.ds.p(),
        "observed": p.ds.observed_count(),
        "columns": p.columns,
        "tau": p.cfg.tau,
        "tau_source": p.tau_source,
        "h": p.cfg.h,
        "kernel": p.cfg.kernel,
        "nu": p.cfg.nu,
        "eps_zero": p.cfg.eps_zero,
        "standardization": p.standardization,
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn fit_json(r: &FitResult<f64>, ds: &Dataset<f64>, cfg: &ModelConfig<f64>) -> Result<Value, CliError> {
    let ratio_approx = el_ratio_approx(ds, cfg, &r.beta)?;
    let ratio_exact = el_ratio_profile(ds, cfg, &r.beta).ok().filter(|v| v.is_finite());
    Ok(json!({
        "algorithm": r.algorithm,
        "beta": r.beta,
        "lambda": r.lambda,
        "iterations": r.iterations,
        "converged": r.converged,
        "trace": r.trace,
        "ratio_approx": ratio_approx,
        "ratio_exact": ratio_exact,
    }))
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(v)? + "\n";
    std::fs::write(&path, text).map_err(|e| CliError::io(path.display().to_string(), e))?;
    Ok(path)
}

fn finish(report: Value, out: Option<&Path>, name: &str) -> Result<Outcome, CliError> {
    let files = match out {
        Some(dir) => vec![write_json(dir, name, &report)?],
        None => Vec::new(),
    };
    Ok(Outcome { report, files })
}

pub fn cmd_fit(a: &FitArgs) -> Result<Outcome, CliError> {
    let p = prepare(&a.input, &a.model)?;
    let algorithm = match a.algorithm {
        UnpenalizedAlgorithm::A1 => Algorithm::A1,
        UnpenalizedAlgorithm::A2 => Algorithm::A2,
    };
    let r = fit(algorithm, &p.ds, &p.cfg, None, None)?;
    let wilks: Option<TestReport> = match &a.hypothesis {
        Some(h) => {
            let beta: Vec<f64> = parse_list(h, "--hypothesis")?;
            Some(wilks_test(&p.ds, &p.cfg, &beta, p.ds.p() as u32, a.model.alpha)?)
        }
        None => None,
    };
    let report = merge(
        merge(
            json!({"schema_version": SCHEMA_VERSION, "command": "fit"}),
            model_json(&p, &a.input),
        ),
        merge(fit_json(&r, &p.ds, &p.cfg)?, json!({ "alpha": a.model.alpha, "wilks": wilks })),
    );
    finish(report, a.out.as_deref(), "fit.json")
}

#[derive(Serialize)]
struct Coefficient<'a> {
    name: &'a str,
    estimate: f64,
    active: bool,
}

fn pilot_mode(p: PilotArg) -> PilotMode {
    match p {
        PilotArg::Same => PilotMode::Same,
        PilotArg::Split => PilotMode::Split,
    }
}

pub fn cmd_select(a: &SelectArgs) -> Result<Outcome, CliError> {
    let prep = prepare(&a.input, &a.model)?;
    let (pilot, fit_ds) = pilot_mode(a.pilot).prepare(&prep.ds, &prep.cfg)?;
    let eta = a.eta.unwrap_or_else(|| default_eta(fit_ds.n()));
    let pen = PenaltyConfig::new(eta, a.gamma, pilot.clone())?;
    let algorithm = match a.algorithm {
        PenalizedAlgorithm::L1 => Algorithm::L1,
        PenalizedAlgorithm::L2 => Algorithm::L2,
    };
    let r = fit(algorithm, &fit_ds, &prep.cfg, Some(&pen), None)?;
    let wilks = match submodel_wilks_test(&fit_ds, &prep.cfg, &r.beta, a.model.alpha) {
        Ok(t) => Some(t),
        Err(expectile_el::Error::EmptyActiveSet) => None,
        Err(e) => return Err(e.into()),
    };
    let coefficients: Vec<Coefficient> = prep
        .columns
        .iter()
        .zip(&r.beta)
        .map(|(name, &estimate)| Coefficient {
            name,
            estimate,
            active: estimate != 0.0,
        })
        .collect();
    let report = merge(
        merge(
            json!({"schema_version": SCHEMA_VERSION, "command": "select"}),
            model_json(&prep, &a.input),
        ),
        merge(
            fit_json(&r, &fit_ds, &prep.cfg)?,
            json!({
                "eta": eta,
                "gamma": a.gamma,
                "pilot_mode": format!("{:?}", a.pilot).to_lowercase(),
                "pilot": pilot,
                "fit_rows": fit_ds.n(),
                "active_set": r.active_set,
                "coefficients": coefficients,
                "alpha": a.model.alpha,
                "wilks_submodel": wilks,
            }),
        ),
    );
    finish(report, a.out.as_deref(), "select.json")
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let prep = prepare(&a.input, &a.model)?;
    let a_values: Vec<f64> = parse_list(&a.a_values, "--a")?;
    if a_values.is_empty() {
        return Err(CliError::Usage("--a needs at least one value".into()));
    }
    let (pilot, fit_ds) = pilot_mode(a.pilot).prepare(&prep.ds, &prep.cfg)?;
    let n = fit_ds.n() as f64;
    let power = match a.grid {
        GridKind::N56 => -5.0 / 6.0,
        GridKind::N67 => -6.0 / 7.0,
    };
    let grid: Vec<f64> = a_values.iter().map(|&c| c * n.powf(power)).collect();
    let sweep = bic_sweep_with_pilot(&fit_ds, &prep.cfg, a.gamma, &pilot, &grid)?;
    let a_of = |eta: f64| grid.iter().position(|&g| g == eta).map(|k| a_values[k]);
    let rows: Vec<Value> = sweep
        .records
        .iter()
        .map(|r| record_json(r, a_of(r.eta)))
        .collect();
    let report = merge(
        merge(
            json!({"schema_version": SCHEMA_VERSION, "command": "sweep"}),
            model_json(&prep, &a.input),
        ),
        json!({
            "grid": format!("{:?}", a.grid).to_lowercase(),
            "gamma": a.gamma,
            "pilot": pilot,
            "records": rows,
            "best": record_json(&sweep.best, a_of(sweep.best.eta)),
            "failures": sweep.failures,
        }),
    );
    let mut out = finish(report, a.out.as_deref(), "sweep.json")?;
    if let Some(dir) = &a.out {
        let path = dir.join("sweep.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["a", "eta", "bic", "penalized_ratio", "active_size", "active_set"])?;
        for r in &sweep.records {
            let set: Vec<String> = r.active_set.iter().map(|j| (j + 1).to_string()).collect();
            w.write_record([
                a_of(r.eta).map_or_else(String::new, |v| v.to_string()),
                r.eta.to_string(),
                r.bic.to_string(),
                r.penalized_ratio.to_string(),
                r.active_set.len().to_string(),
                set.join(" "),
            ])?;
        }
        w.flush().map_err(|e| CliError::io(path.display().to_string(), e))?;
        out.files.push(path);
    }
    Ok(out)
}

fn record_json(r: &BicRecord<f64>, a: Option<f64>) -> Value {
    json!({
        "a": a,
        "eta": r.eta,
        "bic": r.bic,
        "penalized_ratio": r.penalized_ratio,
        "active_set": r.active_set,
        "beta": r.beta,
    })
}

fn parse_missing(s: &str) -> Result<Missingness, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "complete" => Ok(Missingness::Complete),
        "covariate" | "pi(x)" => Ok(Missingness::CovariatePi),
        other => other
            .parse::<f64>()
            .map(Missingness::ConstantPi)
            .map_err(|_| CliError::Usage(format!("--missing '{other}' not understood"))),
    }
}

/// The configuration cells a `simulate` invocation runs.
pub fn simulation_cells(a: &SimulateArgs) -> Result<(String, Vec<SimConfig>), CliError> {
    let (name, mut cells) = match &a.preset {
        Some(p) => (p.clone(), p.parse::<Preset>()?.cells(a.reps, a.seed)),
        None => {
            let n = a
                .n
                .ok_or_else(|| CliError::Usage("simulate needs --preset or --n".into()))?;
            let beta = match &a.beta {
                Some(b) => parse_list(b, "--beta")?,
                None => beta_sparse(a.p, false),
            };
            let design: Design = a.design.parse()?;
            let errors: ErrorLaw = a.errors.parse()?;
            let mut sc = SimConfig::new(n, beta, design, errors, parse_missing(&a.missing)?);
            sc.reps = a.reps;
            sc.seed = a.seed;
            sc.label = "custom".into();
            ("custom".to_string(), vec![sc])
        }
    };
    let algorithms: Option<Vec<Algorithm>> = a.algorithms.as_deref().map(|s| parse_list(s, "--algorithms")).transpose()?;
    let kernel: Option<Kernel> = a.kernel.as_deref().map(str::parse).transpose()?;
    for sc in &mut cells {
        sc.pilot = match a.pilot {
            SimPilotArg::Independent => SimPilot::Independent,
            SimPilotArg::Same => SimPilot::Same,
        };
        if let Some(v) = &algorithms {
            sc.algorithms = v.clone();
        }
        if let Some(k) = kernel {
            sc.kernel = k;
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = a.$f { sc.$f = v; })* };
        }
        set!(tau, h, eta, gamma, alpha, nu, eps_zero);
        sc.validate()?;
    }
    Ok((name, cells))
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    if a.dump && a.out.is_none() {
        return Err(CliError::Usage("--dump needs --out".into()));
    }
    let (name, cells) = simulation_cells(a)?;
    let reports: Vec<SimReport> = cells
        .iter()
        .map(|sc| match a.threads {
            Some(t) => run_monte_carlo_with_threads(sc, t),
            None => run_monte_carlo(sc),
        })
        .collect::<Result<_, _>>()?;
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "preset": name,
        "reps": a.reps,
        "seed": a.seed,
        "cells": reports,
    });
    let mut out = finish(report, a.out.as_deref(), "simulate.json")?;
    if let Some(dir) = &a.out {
        let path = dir.join("simulate.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(SimReport::csv_header())?;
        for r in &reports {
            w.write_record(r.csv_record())?;
        }
        w.flush().map_err(|e| CliError::io(path.display().to_string(), e))?;
        out.files.push(path);
        if a.dump {
            let rep = generate_replication(&cells[0], 0)?;
            let path = dir.join("dump.csv");
            let f = std::fs::File::create(&path).map_err(|e| CliError::io(path.display().to_string(), e))?;
            write_dataset(&rep.dataset, f)?;
            out.files.push(path);
        }
    }
    Ok(out)
}

pub fn cmd_tau(a: &TauArgs) -> Result<Outcome, CliError> {
    let d = load_dataset(&a.input)?;
    let y = d.dataset.observed_responses();
    let tau = empirical_tau(&y)?;
    Ok(Outcome {
        report: json!({
            "schema_version": SCHEMA_VERSION,
            "command": "tau",
            "input": a.input.display().to_string(),
            "observed": y.len(),
            "tau": tau,
        }),
        files: Vec::new(),
    })
}

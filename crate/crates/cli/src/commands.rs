use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use charvol::estimators::EstimatorKind;
use charvol::montecarlo::{
    daily_estimates, run_study, StudyConfig, Tuning, DEFAULT_REPS, DEFAULT_ZETA,
};
use charvol::simulation::{random_seed, simulate_sv_path};
use charvol::theory::{
    bias_functionals, chi, chi_prime, chi_relation, rate_diagnostics, StableTailParams,
};
use charvol::{IVEstimate, Kappa, SimScenario};

use crate::args::{CommonArgs, EstimateArgs, MonteCarloArgs, SimulateArgs, TheoryArgs};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::ingest::{ingest_csv, IngestOptions, ValueColumn};
use crate::output::{csv_writer, fmt_f64, sink};

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = random_seed();
        eprintln!("seed: {s}");
        s
    })
}

fn config_err(e: charvol::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Paths written by `simulate`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateFiles {
    pub path: PathBuf,
    pub truth: PathBuf,
    pub meta: PathBuf,
    pub seed: u64,
}

pub fn cmd_simulate(common: &CommonArgs, args: &SimulateArgs) -> CliResult<SimulateFiles> {
    let cfg = RunConfig::load(common.config.as_deref())?;
    let (seed, _) = cfg.common(common);
    let b = cfg.simulate.merged(args);
    let grid = b.grid.unwrap_or(2400.0);
    if !(grid > 1.0) {
        return Err(CliError::Config(format!(
            "--grid must exceed 1, got {grid}"
        )));
    }
    let seed = resolve_seed(seed);
    let mut sc = SimScenario::study(
        1.0 / grid,
        b.days.unwrap_or(1),
        b.beta.unwrap_or(1.5),
        b.eta.unwrap_or(0.0),
        seed,
    );
    sc.c0 = b.c0.unwrap_or(sc.c0);
    sc.cir_kappa = b.cir_kappa.unwrap_or(sc.cir_kappa);
    sc.cir_theta = b.cir_theta.unwrap_or(sc.cir_theta);
    sc.cir_sigma = b.cir_sigma.unwrap_or(sc.cir_sigma);
    sc.substeps = b.substeps.unwrap_or(sc.substeps);
    sc.validate().map_err(config_err)?;
    let out = simulate_sv_path(&sc)?;

    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    let files = SimulateFiles {
        path: dir.join("path.csv"),
        truth: dir.join("truth.csv"),
        meta: dir.join("meta.json"),
        seed,
    };

    let mut w = csv_writer(Some(&files.path))?;
    w.write_record(["time", "logprice"])?;
    let p = &out.path;
    for (i, x) in p.values().iter().enumerate() {
        w.write_record([fmt_f64(p.t0() + i as f64 * p.delta()), fmt_f64(*x)])?;
    }
    w.flush()?;

    let mut w = csv_writer(Some(&files.truth))?;
    w.write_record(["day", "true_iv"])?;
    for (d, v) in out.true_iv.iter().enumerate() {
        w.write_record([d.to_string(), fmt_f64(*v)])?;
    }
    w.flush()?;

    let meta = json!({
        "seed": seed,
        "scenario": sc,
        "feller_ok": sc.feller_ok(),
        "observations": p.values().len(),
    });
    fs::write(&files.meta, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(files)
}

/// One output row of `estimate`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub day: usize,
    pub estimator: EstimatorKind,
    pub estimate: IVEstimate,
}

/// Resolves configuration and estimates every requested estimator on every
/// whole day of the input.
pub fn estimate_rows(common: &CommonArgs, args: &EstimateArgs) -> CliResult<Vec<EstimateRow>> {
    let cfg = RunConfig::load(common.config.as_deref())?;
    let b = cfg.estimate.merged(args);
    let kinds = b
        .estimators
        .filter(|k| !k.is_empty())
        .ok_or_else(|| CliError::Config("--estimator is required".into()))?;
    let needs_blocks = kinds.iter().find(|k| k.uses_blocks());
    let k_n = match (b.k_n, needs_blocks) {
        (Some(k), _) => k,
        (None, Some(k)) => {
            return Err(CliError::Config(format!(
                "--kn is required for estimator {k}"
            )))
        }
        (None, None) => 2,
    };
    let kappa = Kappa::try_from(b.kappa.unwrap_or(1))
        .map_err(|e| CliError::Config(format!("--kappa: {e}")))?;
    if kappa == Kappa::Symmetrized && kinds.contains(&EstimatorKind::Panel) {
        return Err(CliError::Config(
            "the panel estimator supports --kappa 1 only".into(),
        ));
    }
    let value = match b.value_column.as_deref() {
        None => None,
        Some("price") => Some(ValueColumn::Price),
        Some("logprice") => Some(ValueColumn::LogPrice),
        Some(other) => return Err(CliError::Config(format!("unknown value column '{other}'"))),
    };
    let tuning = Tuning {
        k_n,
        zeta: b.zeta.unwrap_or(DEFAULT_ZETA),
        u: b.u,
        kappa,
        level: b.level.unwrap_or(charvol::estimators::DEFAULT_LEVEL),
    };
    charvol::EstimatorConfig::new(tuning.k_n, tuning.u.unwrap_or(1.0), tuning.zeta, kappa)
        .map_err(config_err)?;
    if !(tuning.level > 0.0 && tuning.level < 1.0) {
        return Err(CliError::Config(format!(
            "--level must lie in (0, 1), got {}",
            tuning.level
        )));
    }

    let opts = IngestOptions {
        time_column: b.time_column.unwrap_or_else(|| "time".into()),
        value,
        delta: b.delta,
    };
    let path = ingest_csv(&args.input, &opts)?;
    let days = path.split_periods(1.0)?;

    let mut rows = Vec::new();
    for kind in kinds {
        if kind == EstimatorKind::Panel && days.len() < 2 {
            return Err(CliError::Data(format!(
                "the panel estimator needs at least 2 days, input has {}",
                days.len()
            )));
        }
        let est = daily_estimates(kind, &days, &tuning)?;
        rows.extend(
            est.into_iter()
                .enumerate()
                .map(|(day, estimate)| EstimateRow {
                    day,
                    estimator: kind,
                    estimate,
                }),
        );
    }
    Ok(rows)
}

pub fn cmd_estimate(common: &CommonArgs, args: &EstimateArgs) -> CliResult<()> {
    let rows = estimate_rows(common, args)?;
    let mut w = csv_writer(common.out.as_deref())?;
    w.write_record([
        "day",
        "estimator",
        "value",
        "avar",
        "ci_low",
        "ci_high",
        "u_used",
        "flags",
    ])?;
    for r in &rows {
        let e = &r.estimate;
        w.write_record([
            r.day.to_string(),
            r.estimator.to_string(),
            fmt_f64(e.value),
            fmt_f64(e.avar),
            fmt_f64(e.ci_low),
            fmt_f64(e.ci_high),
            e.method.u().map(fmt_f64).unwrap_or_default(),
            e.flags.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const MC_HEADER: [&str; 9] = [
    "scenario",
    "estimator",
    "replications",
    "median_bias",
    "mad",
    "median_bias_se",
    "coverage",
    "mean_z",
    "var_z",
];

pub fn study_config(common: &CommonArgs, args: &MonteCarloArgs) -> CliResult<StudyConfig> {
    let cfg = RunConfig::load(common.config.as_deref())?;
    let (seed, threads) = cfg.common(common);
    let b = cfg.montecarlo.merged(args);
    let scenarios = b
        .scenarios
        .filter(|s| !s.is_empty())
        .ok_or_else(|| CliError::Config("montecarlo needs scenarios in --config".into()))?;
    let estimators = b
        .estimators
        .unwrap_or_else(|| vec![EstimatorKind::Tc, EstimatorKind::Panel]);
    let mut study = StudyConfig::new(
        scenarios,
        b.reps.unwrap_or(DEFAULT_REPS),
        estimators,
        resolve_seed(seed),
    );
    study.zeta = b.zeta.unwrap_or(study.zeta);
    study.level = b.level.unwrap_or(study.level);
    study.threads = threads;
    study.keep_replications = args.full;
    study.validate()?;
    Ok(study)
}

pub fn cmd_montecarlo(common: &CommonArgs, args: &MonteCarloArgs) -> CliResult<()> {
    let study = study_config(common, args)?;
    let result = run_study(&study)?;
    let mut w = csv_writer(common.out.as_deref())?;
    w.write_record(MC_HEADER)?;
    for s in &result.summaries {
        w.write_record([
            s.scenario_id.clone(),
            s.estimator.to_string(),
            s.replications.to_string(),
            fmt_f64(s.median_bias),
            fmt_f64(s.mad),
            fmt_f64(s.median_bias_se),
            fmt_f64(s.coverage),
            fmt_f64(s.mean_z),
            fmt_f64(s.var_z),
        ])?;
    }
    w.flush()?;
    if let Some(path) = &args.json {
        let report = json!({
            "seed": study.master_seed,
            "study": study,
            "summaries": result.summaries,
            "replications": result.replications,
        });
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub u: f64,
    pub delta: f64,
    pub horizon: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "A_prime")]
    pub a_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryReport {
    pub beta: f64,
    pub chi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_prime: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_relation: Option<charvol::theory::ChiRelation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias: Option<BiasReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<charvol::theory::RateReport>,
}

pub fn theory_report(common: &CommonArgs, args: &TheoryArgs) -> CliResult<TheoryReport> {
    let cfg = RunConfig::load(common.config.as_deref())?;
    let b = cfg.theory.merged(args);
    let beta = b
        .beta
        .ok_or_else(|| CliError::Config("--beta is required".into()))?;
    let in_range = |lo: f64, hi: f64| beta > lo && beta < hi;
    if args.chi {
        return Ok(TheoryReport {
            beta,
            chi: Some(chi(beta).map_err(config_err)?),
            chi_prime: None,
            chi_relation: None,
            bias: None,
            rates: None,
        });
    }
    if !in_range(0.0, 3.0) {
        return Err(CliError::Config(format!(
            "--beta must lie in (0, 3), got {beta}"
        )));
    }
    let chi_v = in_range(0.0, 2.0).then(|| chi(beta)).transpose()?;
    let chi_p = in_range(1.0, 3.0).then(|| chi_prime(beta)).transpose()?;
    let relation = in_range(0.0, 2.0).then(|| chi_relation(beta)).transpose()?;

    let u = b.u.unwrap_or(1.0);
    let delta = b.delta.unwrap_or(1.0 / 2400.0);
    let horizon = b.horizon.unwrap_or(1.0);
    let params = match (b.gamma, b.gamma_plus, b.gamma_minus) {
        (Some(g), _, _) => Some(StableTailParams::symmetric_from_cf(beta, g).map_err(config_err)?),
        (None, Some(gp), Some(gm)) => {
            Some(StableTailParams::new(beta, gp, gm).map_err(config_err)?)
        }
        (None, None, None) => None,
        _ => {
            return Err(CliError::Config(
                "--gamma-plus and --gamma-minus go together".into(),
            ))
        }
    };
    let bias = params
        .map(|p| -> CliResult<BiasReport> {
            let v = bias_functionals(&p, u, delta, horizon).map_err(config_err)?;
            Ok(BiasReport {
                u,
                delta,
                horizon,
                gamma_plus: p.gamma_plus,
                gamma_minus: p.gamma_minus,
                a: v.a,
                a_prime: v.a_prime,
            })
        })
        .transpose()?;
    let rates = b.k_n.map(|k| rate_diagnostics(k, u, delta));
    Ok(TheoryReport {
        beta,
        chi: chi_v,
        chi_prime: chi_p,
        chi_relation: relation,
        bias,
        rates,
    })
}

pub fn cmd_theory(common: &CommonArgs, args: &TheoryArgs) -> CliResult<()> {
    let report = theory_report(common, args)?;
    write_json(common.out.as_deref(), &report)
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

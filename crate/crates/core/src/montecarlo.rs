//! Replication harness for the simulation study.
//!
//! Each replication simulates one panel of days, applies every requested
//! estimator to the same paths, and records per-day errors against the true
//! daily integrated variance. Summaries report the median bias and the median
//! absolute deviation (MAD) of those errors, plus CI coverage and
//! standardized-error moments for the plug-in CLT.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    bipower_variation, daily_bipower, debiased_iv, default_block_size, integrated_vol,
    mc_adaptive_u, mc_truncation_threshold, panel_debiased_daily, realized_quarticity,
    realized_vol, truncated_quarticity, truncated_rv, EstimatorKind, Flags, IVEstimate, Method,
    PanelOptions, BV_FLOOR, DEFAULT_LEVEL,
};
use crate::grid::{EstimatorConfig, Kappa, SampledPath};
use crate::simulation::{derive_seed, simulate_sv_path, SimScenario};

/// Default number of replications.
pub const DEFAULT_REPS: usize = 500;
/// Default debias ratio.
pub const DEFAULT_ZETA: f64 = 1.5;

/// Asymptotic variance factor of bipower variation, `π²/4 + π − 3`.
const BIPOWER_AVAR: f64 = PI * PI / 4.0 + PI - 3.0;

/// Tuning shared by all daily estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub k_n: usize,
    pub zeta: f64,
    /// Fixed CF argument; `None` selects the bipower-scaled daily rule.
    pub u: Option<f64>,
    pub kappa: Kappa,
    pub level: f64,
}

impl Tuning {
    pub fn for_grid(delta: f64) -> Self {
        Self {
            k_n: default_block_size(delta),
            zeta: DEFAULT_ZETA,
            u: None,
            kappa: Kappa::Plain,
            level: DEFAULT_LEVEL,
        }
    }
}

fn floored(bv: f64) -> (f64, bool) {
    if bv > 0.0 {
        (bv, false)
    } else {
        (BV_FLOOR, true)
    }
}

/// Applies one estimator to each day of a panel with the study's data-driven
/// tuning: `u_t` and the truncation level use the previous day's bipower
/// variation (the first day uses its own).
pub fn daily_estimates(
    kind: EstimatorKind,
    days: &[SampledPath],
    tuning: &Tuning,
) -> Result<Vec<IVEstimate>> {
    if days.is_empty() {
        return Err(Error::invalid("no days to estimate"));
    }
    if kind == EstimatorKind::Panel {
        let mut opts = PanelOptions::new(tuning.k_n, tuning.zeta);
        opts.level = tuning.level;
        return panel_debiased_daily(days, &opts);
    }
    let bvs = daily_bipower(days)?;
    days.iter()
        .enumerate()
        .map(|(t, day)| {
            let delta = day.delta();
            let horizon = day.duration();
            let (bv_prev, prev_floor) = floored(bvs[t.saturating_sub(1)]);
            let flags = Flags {
                bv_floored: prev_floor,
                ..Flags::default()
            };
            let u = match tuning.u {
                Some(u) => u,
                None => mc_adaptive_u(bv_prev, delta)?,
            };
            let cfg = EstimatorConfig::new(tuning.k_n, u, tuning.zeta, tuning.kappa)?;
            let est = match kind {
                EstimatorKind::Rv => {
                    let avar = 2.0 * realized_quarticity(day, horizon)?;
                    IVEstimate::new(
                        realized_vol(day, horizon)?,
                        avar,
                        delta,
                        tuning.level,
                        Method::RealizedVol,
                    )?
                }
                EstimatorKind::Tc => {
                    let v = mc_truncation_threshold(bv_prev, delta)?;
                    let avar = 2.0 * truncated_quarticity(day, horizon, v)?;
                    IVEstimate::new(
                        truncated_rv(day, horizon, v)?,
                        avar,
                        delta,
                        tuning.level,
                        Method::TruncatedRv { threshold: v },
                    )?
                }
                EstimatorKind::Bv => {
                    let v = mc_truncation_threshold(bv_prev, delta)?;
                    let avar = BIPOWER_AVAR * truncated_quarticity(day, horizon, v)?;
                    IVEstimate::new(
                        bipower_variation(day, 0.0, horizon)?,
                        avar,
                        delta,
                        tuning.level,
                        Method::Bipower,
                    )?
                }
                EstimatorKind::Cf => {
                    let mut e = integrated_vol(day, &cfg, horizon)?;
                    e.level = tuning.level;
                    IVEstimate::new(e.value, e.avar, delta, tuning.level, e.method)?
                        .with_flags(e.flags)
                }
                EstimatorKind::CfDebiased => {
                    let e = debiased_iv(day, &cfg, horizon)?;
                    IVEstimate::new(e.value, e.avar, delta, tuning.level, e.method)?
                        .with_flags(e.flags)
                }
                EstimatorKind::Panel => unreachable!(),
            };
            let merged = Flags {
                bv_floored: flags.bv_floored,
                ..est.flags
            };
            Ok(est.with_flags(merged))
        })
        .collect()
}

/// `(median(errors), median(|errors|))`, midpoint convention for even sizes.
pub fn summarize(errors: &[f64]) -> Result<(f64, f64)> {
    if errors.is_empty() {
        return Err(Error::invalid("cannot summarize an empty error sample"));
    }
    let abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
    Ok((median(errors), median(&abs)))
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Fraction of intervals that contain the corresponding true value.
pub fn coverage_test(estimates: &[IVEstimate], truths: &[f64]) -> Result<f64> {
    if estimates.len() != truths.len() {
        return Err(Error::invalid(format!(
            "{} estimates but {} true values",
            estimates.len(),
            truths.len()
        )));
    }
    if estimates.is_empty() {
        return Err(Error::invalid("no estimates"));
    }
    let hits = estimates
        .iter()
        .zip(truths)
        .filter(|(e, &t)| e.contains(t))
        .count();
    Ok(hits as f64 / estimates.len() as f64)
}

/// One scenario of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyScenario {
    pub id: String,
    #[serde(flatten)]
    pub sim: SimScenario,
    /// Block size; defaults to the grid's standard choice.
    #[serde(default)]
    pub k_n: Option<usize>,
}

impl StudyScenario {
    pub fn tuning(&self, zeta: f64, level: f64) -> Tuning {
        let mut t = Tuning::for_grid(self.sim.delta);
        if let Some(k) = self.k_n {
            t.k_n = k;
        }
        t.zeta = zeta;
        t.level = level;
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub scenarios: Vec<StudyScenario>,
    pub reps: usize,
    pub estimators: Vec<EstimatorKind>,
    pub master_seed: u64,
    pub zeta: f64,
    pub level: f64,
    /// Worker threads; `None` uses all available cores.
    pub threads: Option<usize>,
    /// Keep per-replication errors.
    pub keep_replications: bool,
}

impl StudyConfig {
    pub fn new(
        scenarios: Vec<StudyScenario>,
        reps: usize,
        estimators: Vec<EstimatorKind>,
        master_seed: u64,
    ) -> Self {
        Self {
            scenarios,
            reps,
            estimators,
            master_seed,
            zeta: DEFAULT_ZETA,
            level: DEFAULT_LEVEL,
            threads: None,
            keep_replications: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.scenarios.is_empty() || self.estimators.is_empty() {
            return Err(Error::Config(
                "need at least one scenario and one estimator".into(),
            ));
        }
        if !(self.zeta > 1.0) {
            return Err(Error::Config(format!(
                "zeta must exceed 1, got {}",
                self.zeta
            )));
        }
        for s in &self.scenarios {
            s.sim
                .validate()
                .map_err(|e| Error::Config(format!("scenario '{}': {e}", s.id)))?;
            if self.estimators.contains(&EstimatorKind::Panel) && s.sim.days < 2 {
                return Err(Error::Config(format!(
                    "scenario '{}': the panel estimator needs at least 2 days",
                    s.id
                )));
            }
        }
        Ok(())
    }
}

/// Replication statistics for one scenario × estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub scenario_id: String,
    pub estimator: EstimatorKind,
    pub replications: usize,
    /// Number of daily errors pooled.
    pub observations: usize,
    pub median_bias: f64,
    pub mad: f64,
    /// Normal-approximation standard error of the median bias.
    pub median_bias_se: f64,
    pub coverage: f64,
    /// Mean and variance of `(estimate − truth) / √(avar Δ_n)`.
    pub mean_z: f64,
    pub var_z: f64,
    pub mean_runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub scenario_id: String,
    pub estimator: EstimatorKind,
    pub replication: usize,
    pub seed: u64,
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub summaries: Vec<McSummary>,
    pub replications: Option<Vec<ReplicationRecord>>,
}

/// Outcome of one estimator on one replication.
#[derive(Debug, Clone)]
pub struct DailyOutcome {
    pub estimates: Vec<IVEstimate>,
    pub truths: Vec<f64>,
    pub elapsed_ms: f64,
}

/// Simulates one replication and applies every estimator to the same days.
pub fn run_replication(
    sim: &SimScenario,
    seed: u64,
    estimators: &[EstimatorKind],
    tuning: &Tuning,
) -> Result<Vec<DailyOutcome>> {
    let scenario = SimScenario { seed, ..*sim };
    let out = simulate_sv_path(&scenario)?;
    let days = out.path.split_periods(1.0)?;
    estimators
        .iter()
        .map(|&kind| {
            let start = Instant::now();
            let estimates = daily_estimates(kind, &days, tuning)?;
            Ok(DailyOutcome {
                estimates,
                truths: out.true_iv.clone(),
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}

fn scenario_seed(master: u64, scenario: usize) -> u64 {
    derive_seed(master, scenario as u64)
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        f64::NAN
    };
    (mean, var)
}

/// Runs every scenario × estimator for `reps` replications.
///
/// Results depend only on the configuration and `master_seed`: replication
/// `r` of scenario `s` is simulated from `derive_seed(derive_seed(master, s), r)`
/// and outputs are reduced in replication order, whatever the thread count.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let mut summaries = Vec::new();
    let mut records = cfg.keep_replications.then(Vec::new);
    for (si, scenario) in cfg.scenarios.iter().enumerate() {
        let tuning = scenario.tuning(cfg.zeta, cfg.level);
        let base = scenario_seed(cfg.master_seed, si);
        let reps: Vec<(u64, Vec<DailyOutcome>)> = pool.install(|| {
            (0..cfg.reps)
                .into_par_iter()
                .map(|r| {
                    let seed = derive_seed(base, r as u64);
                    run_replication(&scenario.sim, seed, &cfg.estimators, &tuning)
                        .map(|o| (seed, o))
                })
                .collect::<Result<Vec<_>>>()
        })?;

        for (ei, &kind) in cfg.estimators.iter().enumerate() {
            let mut errors = Vec::new();
            let mut z = Vec::new();
            let mut covered = 0usize;
            let mut runtime = 0.0;
            for (r, (seed, outcomes)) in reps.iter().enumerate() {
                let o = &outcomes[ei];
                runtime += o.elapsed_ms;
                let rep_errors: Vec<f64> = o
                    .estimates
                    .iter()
                    .zip(&o.truths)
                    .map(|(e, t)| e.value - t)
                    .collect();
                for (e, &t) in o.estimates.iter().zip(&o.truths) {
                    covered += usize::from(e.contains(t));
                    let zi = e.standardized_error(t, scenario.sim.delta);
                    if zi.is_finite() {
                        z.push(zi);
                    }
                }
                if let Some(rec) = records.as_mut() {
                    rec.push(ReplicationRecord {
                        scenario_id: scenario.id.clone(),
                        estimator: kind,
                        replication: r,
                        seed: *seed,
                        errors: rep_errors.clone(),
                    });
                }
                errors.extend(rep_errors);
            }
            let (median_bias, mad) = summarize(&errors)?;
            let (_, err_var) = mean_var(&errors);
            let (mean_z, var_z) = mean_var(&z);
            let n = errors.len();
            summaries.push(McSummary {
                scenario_id: scenario.id.clone(),
                estimator: kind,
                replications: cfg.reps,
                observations: n,
                median_bias,
                mad,
                median_bias_se: (PI / 2.0).sqrt() * (err_var / n as f64).sqrt(),
                coverage: covered as f64 / n as f64,
                mean_z,
                var_z,
                mean_runtime_ms: runtime / cfg.reps as f64,
            });
        }
    }
    Ok(StudyResult {
        summaries,
        replications: records,
    })
}

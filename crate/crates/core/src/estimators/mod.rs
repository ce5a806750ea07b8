//! Volatility estimators: local characteristic-function estimators, their
//! debiased versions, the panel estimator used in the simulation study, and
//! the realized/truncated/bipower baselines.

mod baseline;
mod cf;
mod panel;
mod tuning;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::grid::Kappa;

pub use baseline::{
    bipower_variation, daily_bipower, realized_quarticity, realized_vol, truncated_quarticity,
    truncated_rv,
};
pub use cf::{
    avar_plugin, debias_correction, debiased_iv, integrated_vol, local_cf, spot_series, spot_vol,
    DebiasOutcome, SpotBlock, SpotSeries, DEBIAS_EPS_ABS, DEBIAS_EPS_DEN,
};
pub use panel::{panel_debiased_daily, PanelOptions};
pub use tuning::{default_block_size, mc_adaptive_u, mc_truncation_threshold, BV_FLOOR};

/// Default two-sided confidence level.
pub const DEFAULT_LEVEL: f64 = 0.95;

/// Estimator family tags, as used on the command line and in result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Rv,
    Tc,
    Bv,
    Cf,
    CfDebiased,
    Panel,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 6] = [
        EstimatorKind::Rv,
        EstimatorKind::Tc,
        EstimatorKind::Bv,
        EstimatorKind::Cf,
        EstimatorKind::CfDebiased,
        EstimatorKind::Panel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Rv => "rv",
            EstimatorKind::Tc => "tc",
            EstimatorKind::Bv => "bv",
            EstimatorKind::Cf => "cf",
            EstimatorKind::CfDebiased => "cf-debiased",
            EstimatorKind::Panel => "panel",
        }
    }

    /// Whether the estimator needs a block size.
    pub fn uses_blocks(self) -> bool {
        matches!(
            self,
            EstimatorKind::Cf | EstimatorKind::CfDebiased | EstimatorKind::Panel
        )
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown estimator '{s}'")))
    }
}

/// Which estimator produced an [`IVEstimate`], with its tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    RealizedVol,
    TruncatedRv { threshold: f64 },
    Bipower,
    Cf { kappa: Kappa, u: f64 },
    CfDebiased { kappa: Kappa, u: f64, zeta: f64 },
    Panel { u: f64, zeta: f64, s_t: f64 },
}

impl Method {
    pub fn kind(&self) -> EstimatorKind {
        match self {
            Method::RealizedVol => EstimatorKind::Rv,
            Method::TruncatedRv { .. } => EstimatorKind::Tc,
            Method::Bipower => EstimatorKind::Bv,
            Method::Cf { .. } => EstimatorKind::Cf,
            Method::CfDebiased { .. } => EstimatorKind::CfDebiased,
            Method::Panel { .. } => EstimatorKind::Panel,
        }
    }

    /// CF argument actually used, if any.
    pub fn u(&self) -> Option<f64> {
        match *self {
            Method::Cf { u, .. } | Method::CfDebiased { u, .. } | Method::Panel { u, .. } => {
                Some(u)
            }
            _ => None,
        }
    }
}

/// Diagnostics attached to an estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// Blocks whose local CF was floored at `1/√k_n`.
    pub clipped_blocks: usize,
    /// Debias denominator was degenerate, raw estimate returned.
    pub correction_skipped: bool,
    /// Times `u` was shrunk by 2/3 after a negative value.
    pub retries: u8,
    /// Value still negative after all retries and clamped to zero.
    pub clamped: bool,
    /// Bipower variation was nonpositive and replaced by the floor.
    pub bv_floored: bool,
}

impl Flags {
    pub fn is_empty(&self) -> bool {
        *self == Flags::default()
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.clipped_blocks > 0 {
            parts.push(format!("clipped={}", self.clipped_blocks));
        }
        if self.correction_skipped {
            parts.push("skip-correction".to_string());
        }
        if self.retries > 0 {
            parts.push(format!("retries={}", self.retries));
        }
        if self.clamped {
            parts.push("clamped".to_string());
        }
        if self.bv_floored {
            parts.push("bv-floor".to_string());
        }
        f.write_str(&parts.join(";"))
    }
}

/// Integrated variance estimate with its plug-in asymptotic variance and a
/// normal confidence interval.
///
/// `avar` is the variance of `(value − C_T) / √Δ_n`, so the interval is
/// `value ± z · √(avar · Δ_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IVEstimate {
    pub value: f64,
    pub avar: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
    pub method: Method,
    pub flags: Flags,
}

impl IVEstimate {
    pub fn new(value: f64, avar: f64, delta: f64, level: f64, method: Method) -> Result<Self> {
        let z = normal_quantile(level)?;
        let half = z * (avar.max(0.0) * delta).sqrt();
        Ok(Self {
            value,
            avar,
            ci_low: value - half,
            ci_high: value + half,
            level,
            method,
            flags: Flags::default(),
        })
    }

    pub fn with_flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    pub fn contains(&self, truth: f64) -> bool {
        self.ci_low <= truth && truth <= self.ci_high
    }

    /// `(value − truth) / √(avar · Δ_n)`.
    pub fn standardized_error(&self, truth: f64, delta: f64) -> f64 {
        (self.value - truth) / (self.avar * delta).sqrt()
    }
}

/// Two-sided standard normal critical value for `level`.
pub fn normal_quantile(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!(
            "confidence level must lie in (0,1), got {level}"
        )));
    }
    let n = Normal::standard();
    Ok(n.inverse_cdf(0.5 + level / 2.0))
}

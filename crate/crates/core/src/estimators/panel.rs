//! Daily debiased estimator with a bias-ratio pooled over a panel of days.
//!
//! For day `t` the jump bias is `A'(u_t)`, which changes from day to day, while
//! the ratio `(C(ζu) − C(u)) / (C(ζ²u) − 2C(ζu) + C(u)) ≈ 1/(ζ^{β−2} − 1)`
//! depends only on the jump activity index. The ratio is therefore estimated
//! once from the whole panel (at the smaller argument `0.3 u_t`) and combined
//! with the daily difference `C(ζu_t) − C(u_t)`.

use super::cf::{avar_plugin, integrated_from_increments, DEBIAS_EPS_ABS, DEBIAS_EPS_DEN};
use super::tuning::{mc_adaptive_u, BV_FLOOR};
use super::{bipower_variation, Flags, IVEstimate, Method, DEFAULT_LEVEL};
use crate::error::{Error, Result};
use crate::grid::{EstimatorConfig, Kappa, SampledPath};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelOptions {
    pub k_n: usize,
    pub zeta: f64,
    /// Scale applied to `u_t` when estimating the pooled ratio.
    pub slope_scale: f64,
    /// Number of `u ← 2u/3` retries for a negative daily value.
    pub max_retries: u8,
    pub level: f64,
}

impl PanelOptions {
    pub fn new(k_n: usize, zeta: f64) -> Self {
        Self {
            k_n,
            zeta,
            slope_scale: 0.3,
            max_retries: 3,
            level: DEFAULT_LEVEL,
        }
    }
}

struct Day<'a> {
    incs: Vec<f64>,
    delta: f64,
    cfg: &'a EstimatorConfig,
}

impl Day<'_> {
    fn c(&self, u: f64) -> Result<f64> {
        let n = self.incs.len();
        integrated_from_increments(&self.incs, self.delta, &self.cfg.at(u), n).map(|(v, _)| v)
    }
}

/// Debiased daily integrated variance for each path in `days` (one path per
/// day, all on the same grid).
///
/// `u_t` follows [`mc_adaptive_u`] with the previous day's bipower variation
/// (the first day uses its own). Both sign restrictions of the estimator are
/// applied; a negative daily value is recomputed with `u` shrunk by 2/3, at
/// most `max_retries` times, and clamped to zero after that.
pub fn panel_debiased_daily(days: &[SampledPath], opts: &PanelOptions) -> Result<Vec<IVEstimate>> {
    if days.len() < 2 {
        return Err(Error::invalid(format!(
            "panel needs at least 2 days, got {}",
            days.len()
        )));
    }
    let delta = days[0].delta();
    if days.iter().any(|d| d.delta() != delta) {
        return Err(Error::invalid("all days must share the same grid spacing"));
    }
    let cfg = EstimatorConfig::new(opts.k_n, 1.0, opts.zeta, Kappa::Plain)?;

    let mut floored = Vec::with_capacity(days.len());
    let mut bvs = Vec::with_capacity(days.len());
    for d in days {
        let bv = bipower_variation(d, 0.0, d.duration())?;
        floored.push(!(bv > 0.0));
        bvs.push(if bv > 0.0 { bv } else { BV_FLOOR });
    }
    let us = (0..days.len())
        .map(|t| mc_adaptive_u(bvs[t.saturating_sub(1)], delta))
        .collect::<Result<Vec<_>>>()?;

    let panel: Vec<Day> = days
        .iter()
        .map(|d| Day {
            incs: d.increments(),
            delta,
            cfg: &cfg,
        })
        .collect();

    let zeta = opts.zeta;
    let (mut num, mut den, mut scale) = (0.0, 0.0, 0.0);
    for (day, &u) in panel.iter().zip(&us) {
        let u = opts.slope_scale * u;
        let c0 = day.c(u)?;
        let c1 = day.c(zeta * u)?;
        let c2 = day.c(zeta * zeta * u)?;
        num += c1 - c0;
        den += c2 - 2.0 * c1 + c0;
        scale += c0;
    }
    let s_t = if den.abs() < DEBIAS_EPS_DEN * scale.abs().max(DEBIAS_EPS_ABS) {
        0.0
    } else {
        (num / den).min(0.0)
    };

    panel
        .iter()
        .zip(us)
        .enumerate()
        .map(|(t, (day, u0))| {
            let mut u = u0;
            let mut flags = Flags {
                bv_floored: floored[t] || (t > 0 && floored[t - 1]),
                ..Flags::default()
            };
            let mut value;
            loop {
                let c_u = day.c(u)?;
                let c_zu = day.c(zeta * u)?;
                value = c_u - s_t * (c_zu - c_u).min(0.0);
                if value >= 0.0 || flags.retries >= opts.max_retries {
                    break;
                }
                u *= 2.0 / 3.0;
                flags.retries += 1;
            }
            if value < 0.0 {
                value = 0.0;
                flags.clamped = true;
            }
            let n = day.incs.len();
            let (_, spot) = integrated_from_increments(&day.incs, delta, &cfg.at(u), n)?;
            flags.clipped_blocks = spot.clipped_count();
            let avar = 2.0 * avar_plugin(&spot, 2)?;
            Ok(IVEstimate::new(
                value,
                avar,
                delta,
                opts.level,
                Method::Panel { u, zeta, s_t },
            )?
            .with_flags(flags))
        })
        .collect()
}

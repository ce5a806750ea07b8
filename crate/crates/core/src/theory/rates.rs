//! Advisory checks of the block size / CF argument against the asymptotic
//! rate conditions `k_n √Δ_n → 0`, `k_n Δ_n^{1/2−ε} → ∞` and
//! `sup k_n √Δ_n / u_n⁴ < ∞`. None of these can be decided at a single `n`,
//! so the report only carries warnings.

use serde::Serialize;

/// `k_n √Δ_n` above this is reported as finite-sample.
const FINITE_SAMPLE: f64 = 1.0;
/// Outside `[LOW, HIGH]` the block size is flagged as implausible.
const LOW: f64 = 0.01;
const HIGH: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RateWarning {
    /// `k_n √Δ_n` is of order one or larger.
    FiniteSample(f64),
    /// `k_n √Δ_n` outside the plausible band.
    OutOfRange(f64),
    /// `u` is zero, so `k_n √Δ_n / u⁴` is undefined.
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub k_sqrt_delta: f64,
    /// `k_n Δ_n^{0.45}`, a proxy for `k_n Δ_n^{1/2−ε}` with `ε = 0.05`.
    pub k_delta_045: f64,
    pub k_sqrt_delta_over_u4: Option<f64>,
    pub warnings: Vec<RateWarning>,
}

pub fn rate_diagnostics(k_n: usize, u: f64, delta: f64) -> RateReport {
    let k = k_n as f64;
    let k_sqrt_delta = k * delta.sqrt();
    let mut warnings = Vec::new();
    if k_sqrt_delta >= FINITE_SAMPLE {
        warnings.push(RateWarning::FiniteSample(k_sqrt_delta));
    }
    if !(LOW..=HIGH).contains(&k_sqrt_delta) {
        warnings.push(RateWarning::OutOfRange(k_sqrt_delta));
    }
    let ratio = if u == 0.0 {
        warnings.push(RateWarning::DivisionByZero);
        None
    } else {
        Some(k_sqrt_delta / u.powi(4))
    };
    RateReport {
        k_sqrt_delta,
        k_delta_045: k * delta.powf(0.45),
        k_sqrt_delta_over_u4: ratio,
        warnings,
    }
}

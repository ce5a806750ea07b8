//! Data-driven tuning rules of the simulation study.

use crate::error::{Error, Result};

/// Replacement for a nonpositive bipower variation (constant paths only).
pub const BV_FLOOR: f64 = 1e-8;

fn check(bv_prev: f64, delta: f64) -> Result<()> {
    if !(bv_prev > 0.0 && bv_prev.is_finite()) {
        return Err(Error::invalid(format!(
            "bipower variation must be positive, got {bv_prev}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    Ok(())
}

/// `u = (log(1/Δ_n))^{−1/30} / √BV`, with BV taken over the previous day.
pub fn mc_adaptive_u(bv_prev: f64, delta: f64) -> Result<f64> {
    check(bv_prev, delta)?;
    Ok((1.0 / delta).ln().powf(-1.0 / 30.0) / bv_prev.sqrt())
}

/// Truncation level `4 √BV Δ_n^{0.49}`.
pub fn mc_truncation_threshold(bv_prev: f64, delta: f64) -> Result<f64> {
    check(bv_prev, delta)?;
    Ok(4.0 * bv_prev.sqrt() * delta.powf(0.49))
}

/// Block size for a daily grid: 240 at 2400 observations per day, 320 at
/// 4800, otherwise the nearest integer to `4.8 / √Δ_n`.
pub fn default_block_size(delta: f64) -> usize {
    let per_day = (1.0 / delta).round() as usize;
    match per_day {
        2400 => 240,
        4800 => 320,
        _ => ((4.8 / delta.sqrt()).round() as usize).max(2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_u_values() {
        let d = 1.0 / 2400.0;
        let u1 = mc_adaptive_u(1.0, d).unwrap();
        // (ln 2400)^{-1/30}
        assert!((u1 - 0.933_887_757_761).abs() < 1e-10, "{u1}");
        assert!((mc_adaptive_u(4.0, d).unwrap() - u1 / 2.0).abs() < 1e-15);
        assert!(mc_adaptive_u(1.0, 1e-12).unwrap() < u1);
        assert!(mc_adaptive_u(0.0, d).is_err());
    }

    #[test]
    fn threshold_values() {
        let d = 1.0 / 2400.0;
        let v = mc_truncation_threshold(1.0, d).unwrap();
        assert!((v - 0.088_258_487_965).abs() < 1e-10, "{v}");
        assert!((mc_truncation_threshold(0.25, d).unwrap() - v / 2.0).abs() < 1e-15);
        assert!(mc_truncation_threshold(1.0, d / 2.0).unwrap() < v);
        assert!(mc_truncation_threshold(-1.0, d).is_err());
    }

    #[test]
    fn block_sizes() {
        assert_eq!(default_block_size(1.0 / 2400.0), 240);
        assert_eq!(default_block_size(1.0 / 4800.0), 320);
        assert_eq!(default_block_size(1.0 / 100.0), 48);
    }
}

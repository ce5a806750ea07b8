use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::grid::SampledPath;

fn leading_increments(path: &SampledPath, horizon_t: f64) -> Result<Vec<f64>> {
    let n = path.horizon_increments(horizon_t)?;
    let mut incs = path.increments();
    incs.truncate(n);
    Ok(incs)
}

/// Sum of squared increments over the first `[t/Δ_n]` increments.
pub fn realized_vol(path: &SampledPath, horizon_t: f64) -> Result<f64> {
    Ok(leading_increments(path, horizon_t)?
        .iter()
        .map(|x| x * x)
        .sum())
}

/// Realized volatility keeping only increments with `|Δ_i X| ≤ threshold`.
pub fn truncated_rv(path: &SampledPath, horizon_t: f64, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::invalid(format!(
            "truncation threshold must be positive, got {threshold}"
        )));
    }
    Ok(leading_increments(path, horizon_t)?
        .iter()
        .filter(|x| x.abs() <= threshold)
        .map(|x| x * x)
        .sum())
}

/// `(1/(3Δ_n)) Σ (Δ_i X)⁴`, which estimates `∫ c² ds` without jumps.
pub fn realized_quarticity(path: &SampledPath, horizon_t: f64) -> Result<f64> {
    truncated_quarticity(path, horizon_t, f64::INFINITY)
}

/// Quarticity restricted to increments below `threshold`.
pub fn truncated_quarticity(path: &SampledPath, horizon_t: f64, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::invalid(format!(
            "truncation threshold must be positive, got {threshold}"
        )));
    }
    let sum: f64 = leading_increments(path, horizon_t)?
        .iter()
        .filter(|x| x.abs() <= threshold)
        .map(|x| x.powi(4))
        .sum();
    Ok(sum / (3.0 * path.delta()))
}

/// Bipower variation `(π/2) Σ |Δ_{i−1} X| |Δ_i X|` over the window
/// `[t_start, t_end)` (times relative to the path start). The sum starts at
/// the second increment of the window.
pub fn bipower_variation(path: &SampledPath, t_start: f64, t_end: f64) -> Result<f64> {
    if !(t_end > t_start && t_start >= 0.0) {
        return Err(Error::invalid(format!(
            "bad bipower window [{t_start}, {t_end})"
        )));
    }
    let first = path.horizon_increments(t_start)?;
    let last = path.horizon_increments(t_end)?;
    if last < first + 2 {
        return Err(Error::invalid(
            "bipower window holds fewer than 2 increments",
        ));
    }
    let incs = path.increments();
    let sum: f64 = incs[first..last]
        .windows(2)
        .map(|w| w[0].abs() * w[1].abs())
        .sum();
    Ok(FRAC_PI_2 * sum)
}

/// Bipower variation of each period path over its full span.
pub fn daily_bipower(days: &[SampledPath]) -> Result<Vec<f64>> {
    days.iter()
        .map(|d| bipower_variation(d, 0.0, d.duration()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn brownian(n: usize, seed: u64) -> SampledPath {
        let delta = 1.0 / n as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let incs: Vec<f64> = (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                delta.sqrt() * z
            })
            .collect();
        SampledPath::from_increments(0.0, &incs, delta).unwrap()
    }

    #[test]
    fn realized_vol_examples() {
        let p = SampledPath::new(vec![0.0, 1.0, 3.0], 0.5).unwrap();
        assert_eq!(realized_vol(&p, 1.0).unwrap(), 5.0);
        let p = SampledPath::new(vec![2.0; 5], 0.25).unwrap();
        assert_eq!(realized_vol(&p, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn realized_vol_brownian() {
        let delta: f64 = 1.0 / 2400.0;
        let rv = realized_vol(&brownian(2400, 1), 1.0).unwrap();
        assert!((rv - 1.0).abs() < 3.0 * (2.0 * delta).sqrt());
    }

    #[test]
    fn truncation_examples() {
        let p = SampledPath::from_increments(0.0, &[0.1, 5.0], 0.5).unwrap();
        assert!((truncated_rv(&p, 1.0, 1.0).unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(
            truncated_rv(&p, 1.0, f64::INFINITY).unwrap(),
            realized_vol(&p, 1.0).unwrap()
        );
        assert!(truncated_rv(&p, 1.0, 0.0).is_err());
    }

    #[test]
    fn bipower_examples() {
        let p = SampledPath::from_increments(0.0, &[1.0, -1.0, 1.0], 1.0 / 3.0).unwrap();
        assert!((bipower_variation(&p, 0.0, 1.0).unwrap() - std::f64::consts::PI).abs() < 1e-12);
        let p = SampledPath::new(vec![0.0; 4], 1.0 / 3.0).unwrap();
        assert_eq!(bipower_variation(&p, 0.0, 1.0).unwrap(), 0.0);
        let p = SampledPath::new(vec![0.0; 4], 0.5).unwrap();
        assert!(bipower_variation(&p, 0.0, 0.5).is_err());
    }

    #[test]
    fn bipower_brownian() {
        let bv = bipower_variation(&brownian(2400, 2), 0.0, 1.0).unwrap();
        assert!((bv - 1.0).abs() < 0.1);
    }

    proptest! {
        #[test]
        fn ordering(incs in proptest::collection::vec(-2.0f64..2.0, 3..60), v in 0.01f64..3.0) {
            let p = SampledPath::from_increments(0.0, &incs, 0.01).unwrap();
            let h = p.duration();
            let rv = realized_vol(&p, h).unwrap();
            let tc = truncated_rv(&p, h, v).unwrap();
            prop_assert!(rv >= tc && tc >= 0.0);
            prop_assert!(bipower_variation(&p, 0.0, h).unwrap() >= 0.0);
        }
    }
}

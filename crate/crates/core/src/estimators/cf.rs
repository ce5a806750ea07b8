use serde::{Deserialize, Serialize};

use super::{Flags, IVEstimate, Method, DEFAULT_LEVEL};
use crate::error::{Error, Result};
use crate::grid::{block_partition, BlockIndex, EstimatorConfig, Kappa, SampledPath};

/// Relative size below which the debias denominator counts as zero.
pub const DEBIAS_EPS_DEN: f64 = 1e-8;
/// Absolute floor on the scale the denominator is compared to.
pub const DEBIAS_EPS_ABS: f64 = 1e-12;

/// `1 − L` for one block, accumulated as a mean of `2 sin²(x/2)` so that it
/// stays accurate when `u` is tiny.
fn block_deficit(
    increments: &[f64],
    delta: f64,
    u: f64,
    block: BlockIndex,
    kappa: Kappa,
) -> Result<f64> {
    let end = block.first_increment + block.count;
    if end > increments.len() {
        return Err(Error::Index(format!(
            "block {} spans increments [{}, {end}) but only {} exist",
            block.j,
            block.first_increment,
            increments.len()
        )));
    }
    if !(u > 0.0 && delta > 0.0) {
        return Err(Error::invalid("u and delta must be positive"));
    }
    let scale = u / delta.sqrt();
    let slice = &increments[block.first_increment..end];
    let half_sin_sq = |dx: f64| {
        let s = (0.5 * scale * dx).sin();
        2.0 * s * s
    };
    let (sum, k) = match kappa {
        Kappa::Plain => (
            slice.iter().map(|&dx| half_sin_sq(dx)).sum::<f64>(),
            slice.len(),
        ),
        Kappa::Symmetrized => {
            if !slice.len().is_multiple_of(2) {
                return Err(Error::invalid(
                    "symmetrized block needs an even number of increments",
                ));
            }
            (
                slice
                    .chunks_exact(2)
                    .map(|p| half_sin_sq(p[0] - p[1]))
                    .sum::<f64>(),
                slice.len() / 2,
            )
        }
    };
    if k == 0 {
        return Err(Error::invalid("empty block"));
    }
    Ok((sum / k as f64).clamp(0.0, 2.0))
}

/// Local empirical characteristic function (real part) over one block:
/// the block average of `cos(u Δ_i X / √Δ_n)`, or of
/// `cos(u (Δ_{2l+1} X − Δ_{2l+2} X) / √Δ_n)` in the symmetrized version.
pub fn local_cf(
    increments: &[f64],
    delta: f64,
    u: f64,
    block: BlockIndex,
    kappa: Kappa,
) -> Result<f64> {
    block_deficit(increments, delta, u, block, kappa).map(|d| 1.0 - d)
}

/// Largest value a local spot estimate can take: `log k_n / (κ u²)`.
fn spot_bound(u: f64, k_n: usize, kappa: Kappa) -> f64 {
    (k_n as f64).ln() / (kappa.as_f64() * u * u)
}

/// `l` and `deficit = 1 − l` are passed separately so neither is recomputed
/// from the other with rounding.
fn spot_from_parts(l: f64, deficit: f64, u: f64, k_n: usize, kappa: Kappa) -> (f64, bool) {
    let bound = spot_bound(u, k_n, kappa);
    if l <= 1.0 / (k_n as f64).sqrt() {
        return (bound, true);
    }
    let c = -2.0 / (kappa.as_f64() * u * u) * (-deficit).ln_1p();
    (c.clamp(0.0, bound), false)
}

/// Spot variance from a local CF value: `−(2/(κu²)) log(L ∨ 1/√k_n)`.
/// The flag reports whether the floor `1/√k_n` was active.
pub fn spot_vol(l_value: f64, u: f64, k_n: usize, kappa: Kappa) -> Result<(f64, bool)> {
    if !(-1.0..=1.0).contains(&l_value) {
        return Err(Error::invalid(format!(
            "local CF value {l_value} outside [-1, 1]"
        )));
    }
    if k_n < 2 {
        return Err(Error::invalid(format!("k_n must be at least 2, got {k_n}")));
    }
    if !(u > 0.0) {
        return Err(Error::invalid("u must be positive"));
    }
    Ok(spot_from_parts(l_value, 1.0 - l_value, u, k_n, kappa))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotBlock {
    pub block: BlockIndex,
    pub l_value: f64,
    pub c_hat: f64,
    pub clipped: bool,
}

/// Per-block spot variance estimates at one CF argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotSeries {
    pub u: f64,
    pub kappa: Kappa,
    pub k_n: usize,
    pub delta: f64,
    pub blocks: Vec<SpotBlock>,
}

impl SpotSeries {
    pub fn clipped_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.clipped).count()
    }

    /// Time covered by the blocks, `κ v_n × #blocks`.
    pub fn covered_time(&self) -> f64 {
        self.kappa.as_f64() * self.k_n as f64 * self.delta * self.blocks.len() as f64
    }

    /// Integrated variance with the finite-`k_n` sinh correction:
    /// `κ v_n Σ_j (ĉ_j − (2/(κ u² k_n)) sinh²(κ u² ĉ_j / 2))`.
    pub fn integrated(&self) -> f64 {
        let kf = self.kappa.as_f64();
        let u2 = self.u * self.u;
        let corr = 2.0 / (kf * u2 * self.k_n as f64);
        let sum: f64 = self
            .blocks
            .iter()
            .map(|b| {
                let s = (0.5 * kf * u2 * b.c_hat).sinh();
                b.c_hat - corr * s * s
            })
            .sum();
        kf * self.k_n as f64 * self.delta * sum
    }
}

/// Spot estimates for every whole block inside the first `horizon_increments`
/// increments.
pub fn spot_series(
    increments: &[f64],
    delta: f64,
    cfg: &EstimatorConfig,
    horizon_increments: usize,
) -> Result<SpotSeries> {
    cfg.validate()?;
    let blocks = block_partition(increments.len(), cfg.k_n, cfg.kappa, horizon_increments)?;
    let blocks = blocks
        .into_iter()
        .map(|block| {
            let deficit = block_deficit(increments, delta, cfg.u, block, cfg.kappa)?;
            let (c_hat, clipped) =
                spot_from_parts(1.0 - deficit, deficit, cfg.u, cfg.k_n, cfg.kappa);
            Ok(SpotBlock {
                block,
                l_value: 1.0 - deficit,
                c_hat,
                clipped,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpotSeries {
        u: cfg.u,
        kappa: cfg.kappa,
        k_n: cfg.k_n,
        delta,
        blocks,
    })
}

/// `κ v_n Σ_j ĉ_j^power`, an estimate of `∫ c^power ds` over the covered time.
pub fn avar_plugin(spot: &SpotSeries, power: u32) -> Result<f64> {
    if power != 2 && power != 4 {
        return Err(Error::invalid(format!("power must be 2 or 4, got {power}")));
    }
    if spot.blocks.is_empty() {
        return Err(Error::invalid("empty spot series"));
    }
    let sum: f64 = spot.blocks.iter().map(|b| b.c_hat.powi(power as i32)).sum();
    Ok(spot.kappa.as_f64() * spot.k_n as f64 * spot.delta * sum)
}

/// CLT variance constant: 2 for the nonsymmetrized estimator, 4 for the
/// symmetrized one.
fn clt_constant(kappa: Kappa) -> f64 {
    2.0 * kappa.as_f64()
}

fn spot_for(path: &SampledPath, cfg: &EstimatorConfig, horizon_t: f64) -> Result<SpotSeries> {
    let horizon = path.horizon_increments(horizon_t)?;
    let spot = spot_series(&path.increments(), path.delta(), cfg, horizon)?;
    if spot.blocks.is_empty() {
        return Err(Error::NoBlocks);
    }
    Ok(spot)
}

pub(crate) fn integrated_from_increments(
    increments: &[f64],
    delta: f64,
    cfg: &EstimatorConfig,
    horizon_increments: usize,
) -> Result<(f64, SpotSeries)> {
    let spot = spot_series(increments, delta, cfg, horizon_increments)?;
    if spot.blocks.is_empty() {
        return Err(Error::NoBlocks);
    }
    Ok((spot.integrated(), spot))
}

/// Characteristic-function estimator of integrated variance over
/// `[t0, t0 + horizon_t]`.
pub fn integrated_vol(
    path: &SampledPath,
    cfg: &EstimatorConfig,
    horizon_t: f64,
) -> Result<IVEstimate> {
    let spot = spot_for(path, cfg, horizon_t)?;
    let avar = clt_constant(cfg.kappa) * avar_plugin(&spot, 2)?;
    let flags = Flags {
        clipped_blocks: spot.clipped_count(),
        ..Flags::default()
    };
    Ok(IVEstimate::new(
        spot.integrated(),
        avar,
        path.delta(),
        DEFAULT_LEVEL,
        Method::Cf {
            kappa: cfg.kappa,
            u: cfg.u,
        },
    )?
    .with_flags(flags))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DebiasOutcome {
    pub value: f64,
    pub skipped: bool,
}

/// `C(u) − (C(ζu) − C(u))² / (C(ζ²u) − 2C(ζu) + C(u))`, skipping the
/// correction when the denominator is numerically zero.
pub fn debias_correction(c_u: f64, c_zu: f64, c_zzu: f64) -> DebiasOutcome {
    let den = c_zzu - 2.0 * c_zu + c_u;
    if den.abs() < DEBIAS_EPS_DEN * c_u.abs().max(DEBIAS_EPS_ABS) {
        return DebiasOutcome {
            value: c_u,
            skipped: true,
        };
    }
    let diff = c_zu - c_u;
    DebiasOutcome {
        value: c_u - diff * diff / den,
        skipped: false,
    }
}

/// Two-stage estimator: evaluates the CF estimator at `u`, `ζu`, `ζ²u` and
/// removes the jump bias extrapolated from the three values.
pub fn debiased_iv(
    path: &SampledPath,
    cfg: &EstimatorConfig,
    horizon_t: f64,
) -> Result<IVEstimate> {
    cfg.validate()?;
    let horizon = path.horizon_increments(horizon_t)?;
    let incs = path.increments();
    let (c_u, spot) = integrated_from_increments(&incs, path.delta(), cfg, horizon)?;
    let (c_zu, _) =
        integrated_from_increments(&incs, path.delta(), &cfg.at(cfg.zeta * cfg.u), horizon)?;
    let (c_zzu, _) = integrated_from_increments(
        &incs,
        path.delta(),
        &cfg.at(cfg.zeta * cfg.zeta * cfg.u),
        horizon,
    )?;
    let out = debias_correction(c_u, c_zu, c_zzu);
    let avar = clt_constant(cfg.kappa) * avar_plugin(&spot, 2)?;
    let flags = Flags {
        clipped_blocks: spot.clipped_count(),
        correction_skipped: out.skipped,
        ..Flags::default()
    };
    Ok(IVEstimate::new(
        out.value,
        avar,
        path.delta(),
        DEFAULT_LEVEL,
        Method::CfDebiased {
            kappa: cfg.kappa,
            u: cfg.u,
            zeta: cfg.zeta,
        },
    )?
    .with_flags(flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::realized_vol;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn block(first: usize, count: usize) -> BlockIndex {
        BlockIndex {
            j: 0,
            first_increment: first,
            count,
        }
    }

    fn brownian(n: usize, delta: f64, seed: u64) -> SampledPath {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let incs: Vec<f64> = (0..n)
            .map(|_| {
                delta.sqrt() * {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z
                }
            })
            .collect::<Vec<f64>>();
        SampledPath::from_increments(0.0, &incs, delta).unwrap()
    }

    #[test]
    fn local_cf_examples() {
        let l = local_cf(&[0.0; 4], 0.01, 3.0, block(0, 4), Kappa::Plain).unwrap();
        assert_eq!(l, 1.0);

        let delta: f64 = 0.01;
        let u = 2.0;
        let incs = [0.0, PI * delta.sqrt() / u];
        let l = local_cf(&incs, delta, u, block(0, 2), Kappa::Plain).unwrap();
        assert!(l.abs() < 1e-15);

        assert!(matches!(
            local_cf(&incs, delta, u, block(1, 2), Kappa::Plain),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn local_cf_gaussian_oracle() {
        // E cos(u Z) = exp(-u²/2) for standard normal Z.
        let delta = 1.0 / 2400.0;
        let k = 1000;
        let path = brownian(k, delta, 11);
        let l = local_cf(&path.increments(), delta, 1.0, block(0, k), Kappa::Plain).unwrap();
        assert!((l - (-0.5f64).exp()).abs() < 3.0 / (k as f64).sqrt());
    }

    #[test]
    fn symmetrized_uses_pairs() {
        // (0.3 − 0.3) and (0.5 − (−0.5)): cos(0) and cos(u·1/√Δ).
        let delta = 1.0;
        let incs = [0.3, 0.3, 0.5, -0.5];
        let l = local_cf(&incs, delta, 1.0, block(0, 4), Kappa::Symmetrized).unwrap();
        assert!((l - (1.0 + 1.0f64.cos()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn spot_vol_examples() {
        assert_eq!(spot_vol(1.0, 0.5, 10, Kappa::Plain).unwrap(), (0.0, false));

        let (c, clipped) = spot_vol(-0.3, 1.0, 100, Kappa::Plain).unwrap();
        assert!(clipped);
        assert!((c - 2.0 * 10f64.ln()).abs() < 1e-12);

        let (c, clipped) = spot_vol((-0.5f64).exp(), 1.0, 10_000, Kappa::Symmetrized).unwrap();
        assert!(!clipped);
        assert!((c - 0.5).abs() < 1e-12);

        assert!(spot_vol(1.5, 1.0, 10, Kappa::Plain).is_err());
    }

    #[test]
    fn constant_path_gives_zero() {
        let path = SampledPath::new(vec![4.2; 101], 0.01).unwrap();
        let cfg = EstimatorConfig::new(10, 1.0, 1.5, Kappa::Plain).unwrap();
        let e = integrated_vol(&path, &cfg, 1.0).unwrap();
        assert_eq!(e.value, 0.0);
        let cfg = EstimatorConfig::new(10, 1.0, 1.5, Kappa::Symmetrized).unwrap();
        assert_eq!(integrated_vol(&path, &cfg, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn horizon_shorter_than_block() {
        let path = SampledPath::new(vec![0.0; 11], 0.1).unwrap();
        let cfg = EstimatorConfig::new(20, 1.0, 1.5, Kappa::Plain).unwrap();
        assert_eq!(integrated_vol(&path, &cfg, 1.0), Err(Error::NoBlocks));
    }

    #[test]
    fn brownian_unit_variance() {
        let delta = 1.0 / 4800.0;
        let path = brownian(4800, delta, 3);
        let cfg = EstimatorConfig::new(320, 1.0, 1.5, Kappa::Plain).unwrap();
        let e = integrated_vol(&path, &cfg, 1.0).unwrap();
        assert!(
            (e.value - 1.0).abs() < 3.0 * (2.0 * delta).sqrt(),
            "{}",
            e.value
        );
        assert!(e.ci_low <= e.value && e.value <= e.ci_high);
    }

    #[test]
    fn small_u_recovers_realized_vol() {
        let delta = 1.0 / 2400.0;
        let path = brownian(2400, delta, 5);
        let cfg = EstimatorConfig::new(240, 1e-4, 1.5, Kappa::Plain).unwrap();
        let e = integrated_vol(&path, &cfg, 1.0).unwrap();
        let rv = realized_vol(&path, 1.0).unwrap();
        assert!((e.value - rv).abs() <= 1e-4 * rv);
    }

    #[test]
    fn debias_examples() {
        let d = debias_correction(1.0, 1.0, 1.0);
        assert_eq!(
            d,
            DebiasOutcome {
                value: 1.0,
                skipped: true
            }
        );
        let d = debias_correction(1.2, 1.1, 1.05);
        assert!(!d.skipped);
        assert!((d.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn debiased_on_constant_path_skips() {
        let path = SampledPath::new(vec![0.0; 101], 0.01).unwrap();
        let cfg = EstimatorConfig::new(10, 1.0, 1.5, Kappa::Plain).unwrap();
        let e = debiased_iv(&path, &cfg, 1.0).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.flags.correction_skipped);
    }

    #[test]
    fn avar_plugin_examples() {
        let mk = |c: f64, n: usize, k: usize, delta: f64| SpotSeries {
            u: 1.0,
            kappa: Kappa::Plain,
            k_n: k,
            delta,
            blocks: (0..n)
                .map(|j| SpotBlock {
                    block: BlockIndex {
                        j,
                        first_increment: j * k,
                        count: k,
                    },
                    l_value: 0.5,
                    c_hat: c,
                    clipped: false,
                })
                .collect(),
        };
        assert!((avar_plugin(&mk(1.0, 10, 10, 0.01), 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((avar_plugin(&mk(2.0, 5, 10, 0.01), 2).unwrap() - 2.0).abs() < 1e-12);
        assert!(avar_plugin(&mk(2.0, 0, 10, 0.01), 2).is_err());
        assert!(avar_plugin(&mk(2.0, 1, 10, 0.01), 3).is_err());
    }

    proptest! {
        #[test]
        fn spot_within_bounds(l in -1.0f64..=1.0, u in 1e-3f64..10.0, k in 2usize..5000, sym in any::<bool>()) {
            let kappa = if sym { Kappa::Symmetrized } else { Kappa::Plain };
            let (c, clipped) = spot_vol(l, u, k, kappa).unwrap();
            prop_assert!(c >= 0.0);
            prop_assert!(c <= (k as f64).ln() / (kappa.as_f64() * u * u));
            prop_assert_eq!(clipped, l <= 1.0 / (k as f64).sqrt());
        }

        #[test]
        fn shift_invariant(shift in -100.0f64..100.0, seed in 0u64..1000) {
            let path = brownian(200, 0.005, seed);
            let shifted: Vec<f64> = path.values().iter().map(|v| v + shift).collect();
            let shifted = SampledPath::new(shifted, 0.005).unwrap();
            let cfg = EstimatorConfig::new(20, 0.8, 1.5, Kappa::Plain).unwrap();
            let a = integrated_vol(&path, &cfg, 1.0).unwrap().value;
            let b = integrated_vol(&shifted, &cfg, 1.0).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1e-12));
        }

        #[test]
        fn local_cf_in_unit_interval(incs in proptest::collection::vec(-10.0f64..10.0, 8), u in 0.01f64..20.0) {
            for kappa in [Kappa::Plain, Kappa::Symmetrized] {
                let l = local_cf(&incs, 0.01, u, block(0, 8), kappa).unwrap();
                prop_assert!((-1.0..=1.0).contains(&l));
            }
        }
    }
}

//! Symmetric β-stable variates by the Chambers–Mallows–Stuck transformation.
//!
//! The standardization is `E exp(iuY_t) = exp(−t |u|^β)`; at β = 2 this is
//! `N(0, 2t)` and at β = 1 a Cauchy law with scale `t`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Open01};

use super::seed::{stream_rng, Stream};
use crate::error::{Error, Result};

/// Symmetric stable law with CF `exp(−scale^β |u|^β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricStable {
    beta: f64,
    scale: f64,
}

impl SymmetricStable {
    pub fn new(beta: f64, scale: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::domain(format!(
                "stability index must lie in (0, 2], got {beta}"
            )));
        }
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!(
                "scale must be nonnegative, got {scale}"
            )));
        }
        Ok(Self { beta, scale })
    }

    /// Law of the increment `Y_{t+dt} − Y_t`: scale `dt^{1/β}`.
    pub fn increment(beta: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::invalid(format!("dt must be positive, got {dt}")));
        }
        Self::new(beta, dt.powf(1.0 / beta))
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl Distribution<f64> for SymmetricStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        let v = PI * (u - 0.5);
        let e: f64 = Open01.sample(rng);
        let w = -e.ln();
        let b = self.beta;
        let x = if b == 1.0 {
            v.tan()
        } else {
            (b * v).sin() / v.cos().powf(1.0 / b) * (((1.0 - b) * v).cos() / w).powf((1.0 - b) / b)
        };
        self.scale * x
    }
}

/// `n` i.i.d. increments of the CF-standardized symmetric stable process over
/// steps of length `dt`.
pub fn sample_stable_increments(beta: f64, n: usize, dt: f64, seed: u64) -> Result<Vec<f64>> {
    let dist = SymmetricStable::increment(beta, dt)?;
    let mut rng = stream_rng(seed, Stream::Jumps);
    Ok((0..n).map(|_| dist.sample(&mut rng)).collect())
}

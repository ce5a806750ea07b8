//! Observation grid, increments and block bookkeeping.
//!
//! Time is measured in days. A [`SampledPath`] holds log-prices on a uniform
//! grid of spacing `delta`; every estimator in this crate is a function of
//! the increments of that path only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when converting a time horizon into a count of
/// increments, so that `1.0 / delta` grid points are not lost to rounding.
const HORIZON_SLACK: f64 = 1e-9;

/// Log-price observations `X_{t0 + i * delta}` on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPath {
    values: Vec<f64>,
    delta: f64,
    t0: f64,
}

impl SampledPath {
    pub fn new(values: Vec<f64>, delta: f64) -> Result<Self> {
        Self::with_start(values, delta, 0.0)
    }

    pub fn with_start(values: Vec<f64>, delta: f64, t0: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid(format!(
                "a path needs at least 2 observations, got {}",
                values.len()
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!(
                "grid spacing must be positive, got {delta}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::invalid("start time must be finite"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("observation {i} is not finite")));
        }
        Ok(Self { values, delta, t0 })
    }

    /// Builds a path from increments, starting at `x0`.
    pub fn from_increments(x0: f64, increments: &[f64], delta: f64) -> Result<Self> {
        let mut values = Vec::with_capacity(increments.len() + 1);
        let mut x = x0;
        values.push(x);
        for dx in increments {
            x += dx;
            values.push(x);
        }
        Self::new(values, delta)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn n_increments(&self) -> usize {
        self.values.len() - 1
    }

    /// Time span covered by the path.
    pub fn duration(&self) -> f64 {
        self.n_increments() as f64 * self.delta
    }

    /// `Δ_i X = X_{iΔ} − X_{(i−1)Δ}` for `i = 1..=n_increments`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Number of whole increments inside `[t0, t0 + horizon]`, i.e. `[horizon / Δ]`.
    pub fn horizon_increments(&self, horizon: f64) -> Result<usize> {
        if !(horizon >= 0.0) {
            return Err(Error::invalid(format!(
                "horizon must be nonnegative, got {horizon}"
            )));
        }
        let count = (horizon / self.delta * (1.0 + HORIZON_SLACK)).floor() as usize;
        if count > self.n_increments() {
            return Err(Error::invalid(format!(
                "horizon {horizon} exceeds path duration {}",
                self.duration()
            )));
        }
        Ok(count)
    }

    /// Sub-path made of `count` increments starting after observation `first`.
    pub fn window(&self, first: usize, count: usize) -> Result<Self> {
        let end = first + count;
        if count == 0 || end > self.n_increments() {
            return Err(Error::Index(format!(
                "window [{first}, {end}) outside path of {} increments",
                self.n_increments()
            )));
        }
        Ok(Self {
            values: self.values[first..=end].to_vec(),
            delta: self.delta,
            t0: self.t0 + first as f64 * self.delta,
        })
    }

    /// Splits the path into consecutive periods of length `period` (one day by
    /// default in this crate). Adjacent periods share their boundary
    /// observation; a trailing partial period is dropped.
    pub fn split_periods(&self, period: f64) -> Result<Vec<Self>> {
        let per = (period / self.delta * (1.0 + HORIZON_SLACK)).floor() as usize;
        if per == 0 {
            return Err(Error::invalid("period shorter than one increment"));
        }
        let n = self.n_increments() / per;
        if n == 0 {
            return Err(Error::invalid("path shorter than one period"));
        }
        (0..n).map(|d| self.window(d * per, per)).collect()
    }
}

/// Local characteristic-function flavour: nonsymmetrized (raw increments) or
/// symmetrized (differences of consecutive increments).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Kappa {
    Plain,
    Symmetrized,
}

impl Kappa {
    pub fn get(self) -> usize {
        match self {
            Kappa::Plain => 1,
            Kappa::Symmetrized => 2,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.get() as f64
    }
}

impl TryFrom<u8> for Kappa {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Kappa::Plain),
            2 => Ok(Kappa::Symmetrized),
            _ => Err(Error::invalid(format!("kappa must be 1 or 2, got {v}"))),
        }
    }
}

impl From<Kappa> for u8 {
    fn from(k: Kappa) -> u8 {
        k.get() as u8
    }
}

/// Tuning for one characteristic-function estimation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub k_n: usize,
    pub u: f64,
    pub zeta: f64,
    pub kappa: Kappa,
}

impl EstimatorConfig {
    pub fn new(k_n: usize, u: f64, zeta: f64, kappa: Kappa) -> Result<Self> {
        let cfg = Self {
            k_n,
            u,
            zeta,
            kappa,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_n < 2 {
            return Err(Error::invalid(format!(
                "k_n must be at least 2, got {}",
                self.k_n
            )));
        }
        if !(self.u > 0.0 && self.u.is_finite()) {
            return Err(Error::invalid(format!(
                "u must be positive, got {}",
                self.u
            )));
        }
        if !(self.zeta > 1.0 && self.zeta.is_finite()) {
            return Err(Error::invalid(format!(
                "zeta must exceed 1, got {}",
                self.zeta
            )));
        }
        Ok(())
    }

    /// Same configuration evaluated at a different CF argument.
    pub fn at(&self, u: f64) -> Self {
        Self { u, ..*self }
    }

    /// Block time length `v_n = k_n Δ_n`.
    pub fn block_length(&self, delta: f64) -> f64 {
        self.k_n as f64 * delta
    }
}

/// One block of increments used by a local characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockIndex {
    pub j: usize,
    pub first_increment: usize,
    pub count: usize,
}

/// Disjoint consecutive blocks of `κ k_n` increments covering the first
/// `horizon_increments` increments; a trailing partial block is dropped.
pub fn block_partition(
    n_increments: usize,
    k_n: usize,
    kappa: Kappa,
    horizon_increments: usize,
) -> Result<Vec<BlockIndex>> {
    if k_n < 2 {
        return Err(Error::invalid(format!("k_n must be at least 2, got {k_n}")));
    }
    if horizon_increments > n_increments {
        return Err(Error::invalid(format!(
            "horizon of {horizon_increments} increments exceeds the {n_increments} available"
        )));
    }
    let width = kappa.get() * k_n;
    Ok((0..horizon_increments / width)
        .map(|j| BlockIndex {
            j,
            first_increment: j * width,
            count: width,
        })
        .collect())
}

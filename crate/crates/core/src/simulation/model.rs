use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::seed::{stream_rng, Stream};
use super::stable::SymmetricStable;
use crate::error::{Error, Result};
use crate::grid::SampledPath;

/// Tolerance for `1/Δ_n` being an integer number of steps per day.
const GRID_TOL: f64 = 1e-9;

/// Stochastic volatility plus stable jumps:
///
/// ```text
/// dX = √c dW + η dY,   dc = κ(θ − c) dt + σ √c dW'
/// ```
///
/// with `W`, `W'`, `Y` independent and `Y` CF-standardized symmetric stable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimScenario {
    pub delta: f64,
    pub days: usize,
    pub beta: f64,
    pub eta: f64,
    #[serde(default = "defaults::c0")]
    pub c0: f64,
    #[serde(default = "defaults::cir_kappa")]
    pub cir_kappa: f64,
    #[serde(default = "defaults::cir_theta")]
    pub cir_theta: f64,
    #[serde(default = "defaults::cir_sigma")]
    pub cir_sigma: f64,
    #[serde(default = "defaults::substeps")]
    pub substeps: usize,
    #[serde(default)]
    pub seed: u64,
}

mod defaults {
    pub fn c0() -> f64 {
        1.0
    }
    pub fn cir_kappa() -> f64 {
        0.03
    }
    pub fn cir_theta() -> f64 {
        1.0
    }
    pub fn cir_sigma() -> f64 {
        0.15
    }
    pub fn substeps() -> usize {
        10
    }
}

impl SimScenario {
    /// Scenario with the study's variance dynamics
    /// (`dc = 0.03(1 − c)dt + 0.15√c dW'`, `c_0 = 1`).
    pub fn study(delta: f64, days: usize, beta: f64, eta: f64, seed: u64) -> Self {
        Self {
            delta,
            days,
            beta,
            eta,
            c0: defaults::c0(),
            cir_kappa: defaults::cir_kappa(),
            cir_theta: defaults::cir_theta(),
            cir_sigma: defaults::cir_sigma(),
            substeps: defaults::substeps(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        let per_day = 1.0 / self.delta;
        if (per_day - per_day.round()).abs() > GRID_TOL * per_day {
            return Err(Error::invalid(format!(
                "1/delta = {per_day} is not an integer"
            )));
        }
        if self.days == 0 {
            return Err(Error::invalid("days must be at least 1"));
        }
        if self.eta > 0.0 && !(self.beta > 0.0 && self.beta <= 2.0) {
            return Err(Error::domain(format!(
                "beta must lie in (0, 2], got {}",
                self.beta
            )));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid(format!(
                "eta must be nonnegative, got {}",
                self.eta
            )));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::invalid(format!(
                "c0 must be positive, got {}",
                self.c0
            )));
        }
        if !(self.cir_kappa >= 0.0 && self.cir_sigma >= 0.0 && self.cir_theta >= 0.0) {
            return Err(Error::invalid("CIR parameters must be nonnegative"));
        }
        if self.substeps == 0 {
            return Err(Error::invalid("substeps must be at least 1"));
        }
        Ok(())
    }

    pub fn steps_per_day(&self) -> usize {
        (1.0 / self.delta).round() as usize
    }

    pub fn n_observations(&self) -> usize {
        self.days * self.steps_per_day()
    }

    /// Whether `σ² ≤ 2κθ`. Not required by the simulator; reported only.
    pub fn feller_ok(&self) -> bool {
        self.cir_sigma * self.cir_sigma <= 2.0 * self.cir_kappa * self.cir_theta
    }

    fn fine_dt(&self) -> f64 {
        self.delta / self.substeps as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutput {
    pub path: SampledPath,
    /// `∫ c_s ds` over each day.
    pub true_iv: Vec<f64>,
    /// Variance on the fine grid, when requested.
    pub true_spot: Option<Vec<f64>>,
}

/// Full-truncation Euler stepper:
/// `c ← c + κ(θ − c⁺)dt + σ √(c⁺) √dt Z`.
struct CirStepper {
    c: f64,
    kappa: f64,
    theta: f64,
    sigma: f64,
    dt: f64,
    sqrt_dt: f64,
    rng: ChaCha8Rng,
}

impl CirStepper {
    fn new(s: &SimScenario) -> Self {
        let dt = s.fine_dt();
        Self {
            c: s.c0,
            kappa: s.cir_kappa,
            theta: s.cir_theta,
            sigma: s.cir_sigma,
            dt,
            sqrt_dt: dt.sqrt(),
            rng: stream_rng(s.seed, Stream::Variance),
        }
    }

    fn step(&mut self) -> f64 {
        let cp = self.c.max(0.0);
        let z: f64 = if self.sigma == 0.0 {
            0.0
        } else {
            StandardNormal.sample(&mut self.rng)
        };
        self.c +=
            self.kappa * (self.theta - cp) * self.dt + self.sigma * cp.sqrt() * self.sqrt_dt * z;
        self.c
    }
}

/// Raw variance path on the fine grid `Δ_n / substeps` (may dip below zero;
/// drift and diffusion use the positive part).
pub fn simulate_cir(scenario: &SimScenario) -> Result<Vec<f64>> {
    scenario.validate()?;
    let n = scenario.n_observations() * scenario.substeps;
    let mut stepper = CirStepper::new(scenario);
    let mut out = Vec::with_capacity(n + 1);
    out.push(scenario.c0);
    out.extend((0..n).map(|_| stepper.step()));
    Ok(out)
}

/// Simulates the stochastic-volatility-plus-jumps model on the observation
/// grid and returns the daily integrated variance alongside.
///
/// Conditionally on the variance path, the Euler increment
/// `Σ_k √(c_k⁺) √dt Z_k` over one observation interval is exactly
/// `N(0, Σ_k c_k⁺ dt)`, and the sum of the stable increments over the
/// interval is exactly stable with scale `Δ_n^{1/β}`; both are drawn in one
/// shot per observation.
pub fn simulate_sv_path(scenario: &SimScenario) -> Result<SimOutput> {
    simulate_sv_path_with(scenario, false)
}

pub fn simulate_sv_path_with(scenario: &SimScenario, record_spot: bool) -> Result<SimOutput> {
    scenario.validate()?;
    let per_day = scenario.steps_per_day();
    let n = scenario.n_observations();
    let dt = scenario.fine_dt();

    let mut cir = CirStepper::new(scenario);
    let mut price_rng = stream_rng(scenario.seed, Stream::Price);
    let mut jump_rng = stream_rng(scenario.seed, Stream::Jumps);
    let jumps = if scenario.eta > 0.0 {
        Some(SymmetricStable::increment(scenario.beta, scenario.delta)?)
    } else {
        None
    };

    let mut spot = record_spot.then(|| {
        let mut v = Vec::with_capacity(n * scenario.substeps + 1);
        v.push(scenario.c0);
        v
    });
    let mut values = Vec::with_capacity(n + 1);
    let mut x = 0.0;
    values.push(x);
    let mut true_iv = Vec::with_capacity(scenario.days);
    let mut day_iv = 0.0;
    let mut c_prev = scenario.c0;

    for i in 0..n {
        let mut var = 0.0;
        for _ in 0..scenario.substeps {
            let cp = c_prev.max(0.0);
            var += cp * dt;
            let c_next = cir.step();
            day_iv += 0.5 * (cp + c_next.max(0.0)) * dt;
            if let Some(s) = spot.as_mut() {
                s.push(c_next);
            }
            c_prev = c_next;
        }
        let z: f64 = StandardNormal.sample(&mut price_rng);
        let mut dx = var.sqrt() * z;
        if let Some(j) = &jumps {
            dx += scenario.eta * j.sample(&mut jump_rng);
        }
        x += dx;
        values.push(x);
        if (i + 1) % per_day == 0 {
            true_iv.push(day_iv);
            day_iv = 0.0;
        }
    }

    Ok(SimOutput {
        path: SampledPath::new(values, scenario.delta)?,
        true_iv,
        true_spot: spot,
    })
}

/// `X = σ W + γ Y` with constant coefficients; `true_iv` holds `σ²` times the
/// length of each (possibly partial, final) day.
pub fn simulate_levy_const(
    sigma: f64,
    gamma: f64,
    beta: f64,
    delta: f64,
    n: usize,
    seed: u64,
) -> Result<SimOutput> {
    if !(beta > 1.0 && beta < 2.0) {
        return Err(Error::domain(format!(
            "beta must lie in (1, 2), got {beta}"
        )));
    }
    if !(delta > 0.0) || n == 0 {
        return Err(Error::invalid("delta must be positive and n at least 1"));
    }
    let jumps = SymmetricStable::increment(beta, delta)?;
    let mut price_rng = stream_rng(seed, Stream::Price);
    let mut jump_rng = stream_rng(seed, Stream::Jumps);
    let sd = sigma * delta.sqrt();
    let incs: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut price_rng);
            let y = if gamma == 0.0 {
                0.0
            } else {
                gamma * jumps.sample(&mut jump_rng)
            };
            sd * z + y
        })
        .collect();
    let total = n as f64 * delta;
    let full_days = (total * (1.0 + GRID_TOL)).floor() as usize;
    let mut true_iv = vec![sigma * sigma; full_days];
    let rest = total - full_days as f64;
    if rest > GRID_TOL * total {
        true_iv.push(sigma * sigma * rest);
    }
    Ok(SimOutput {
        path: SampledPath::from_increments(0.0, &incs, delta)?,
        true_iv,
        true_spot: None,
    })
}

/// Draws a fresh random seed (used when the caller does not supply one).
pub fn random_seed() -> u64 {
    rand::rng().random()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::realized_vol;

    fn quiet(delta: f64, days: usize) -> SimScenario {
        SimScenario {
            cir_sigma: 0.0,
            eta: 0.0,
            ..SimScenario::study(delta, days, 1.5, 0.0, 1)
        }
    }

    #[test]
    fn deterministic_ode_limit() {
        let mut s = quiet(0.01, 20);
        s.c0 = 2.0;
        let c = simulate_cir(&s).unwrap();
        let dt = s.fine_dt();
        for (k, v) in c.iter().enumerate().step_by(500) {
            let t = k as f64 * dt;
            let exact = 1.0 + (s.c0 - 1.0) * (-0.03 * t).exp();
            assert!((v - exact).abs() < 1e-4, "t={t}: {v} vs {exact}");
        }
    }

    #[test]
    fn true_iv_matches_ode_integral() {
        let mut s = quiet(1.0 / 2400.0, 2);
        s.c0 = 0.5;
        let out = simulate_sv_path(&s).unwrap();
        for (d, iv) in out.true_iv.iter().enumerate() {
            let (a, b) = (d as f64, d as f64 + 1.0);
            // ∫ 1 + (c0 − 1) e^{−0.03 t} dt
            let exact = (b - a) + (s.c0 - 1.0) / 0.03 * ((-0.03 * a).exp() - (-0.03 * b).exp());
            assert!((iv - exact).abs() < 1e-4);
        }
    }

    #[test]
    fn stationary_mean() {
        // Autocorrelation time is ~2/κ ≈ 67 days, so 10⁶ days give a standard
        // error near 0.005 on the mean.
        let s = SimScenario {
            delta: 0.5,
            substeps: 1,
            ..SimScenario::study(0.5, 1_000_000, 1.5, 0.0, 17)
        };
        let c = simulate_cir(&s).unwrap();
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn seeded_runs_repeat() {
        let s = SimScenario::study(1.0 / 2400.0, 2, 1.5, 1.0, 7);
        assert_eq!(simulate_sv_path(&s).unwrap(), simulate_sv_path(&s).unwrap());
        assert_eq!(simulate_cir(&s).unwrap(), simulate_cir(&s).unwrap());
    }

    #[test]
    fn pure_brownian_rv() {
        let s = quiet(1.0 / 2400.0, 1);
        let out = simulate_sv_path(&s).unwrap();
        assert_eq!(out.path.values().len(), 2401);
        assert_eq!(out.true_iv.len(), 1);
        assert!((out.true_iv[0] - 1.0).abs() < 1e-12);
        let rv = realized_vol(&out.path, 1.0).unwrap();
        assert!((rv - 1.0).abs() < 3.0 * (2.0f64 / 2400.0).sqrt());
    }

    #[test]
    fn no_jumps_means_small_increments() {
        let s = SimScenario::study(1.0 / 2400.0, 3, 1.5, 0.0, 5);
        let out = simulate_sv_path_with(&s, true).unwrap();
        let cmax = out.true_spot.unwrap().into_iter().fold(0.0, f64::max);
        let bound = 6.0 * (cmax * s.delta * (1.0 / s.delta).ln()).sqrt();
        let biggest = out
            .path
            .increments()
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max);
        assert!(biggest < bound);
    }

    #[test]
    fn jump_stream_does_not_touch_variance() {
        let a = SimScenario::study(1.0 / 2400.0, 1, 1.5, 1.0, 3);
        let b = SimScenario {
            eta: 2.0,
            beta: 1.25,
            ..a
        };
        let (oa, ob) = (simulate_sv_path(&a).unwrap(), simulate_sv_path(&b).unwrap());
        assert_eq!(oa.true_iv, ob.true_iv);
        assert_ne!(oa.path, ob.path);
    }

    #[test]
    fn jumps_inflate_realized_vol() {
        let s = SimScenario::study(1.0 / 2400.0, 1, 1.75, 2.0, 8);
        let out = simulate_sv_path(&s).unwrap();
        assert!(realized_vol(&out.path, 1.0).unwrap() > 2.0 * out.true_iv[0]);
    }

    #[test]
    fn levy_const_log_cf() {
        // −(2/u²) log mean cos(uΔX/√Δ) ≈ σ² + 2|γ|^β u^{β−2} Δ^{1−β/2}
        let (sigma, gamma, beta, delta) = (1.0, 0.5, 1.5, 1.0 / 4800.0);
        let n = 200_000;
        let out = simulate_levy_const(sigma, gamma, beta, delta, n, 4).unwrap();
        let u: f64 = 1.0;
        let l = out
            .path
            .increments()
            .iter()
            .map(|x| (u * x / delta.sqrt()).cos())
            .sum::<f64>()
            / n as f64;
        let got = -2.0 / (u * u) * l.ln();
        let want = sigma * sigma
            + 2.0 * gamma.powf(beta) * u.powf(beta - 2.0) * delta.powf(1.0 - beta / 2.0);
        // sd of the log-CF estimate ≈ (2/u²) √(Var cos / n) / L.
        let se = 2.0 * (0.5 / n as f64).sqrt() / l;
        assert!((got - want).abs() < 4.0 * se, "{got} vs {want}");
        assert_eq!(out.true_iv.len(), 42);
        assert!((out.true_iv.last().unwrap() - (n as f64 * delta - 41.0)).abs() < 1e-9);
    }

    #[test]
    fn scenario_json_round_trip() {
        let s = SimScenario::study(1.0 / 4800.0, 132, 1.25, 2.0, 99);
        let txt = serde_json::to_string(&s).unwrap();
        let back: SimScenario = serde_json::from_str(&txt).unwrap();
        assert_eq!(s, back);
        let minimal: SimScenario =
            serde_json::from_str(r#"{"delta":0.0004166666666666667,"days":1,"beta":1.5,"eta":1}"#)
                .unwrap();
        assert_eq!(minimal.substeps, 10);
        assert_eq!(minimal.cir_sigma, 0.15);
        assert!(minimal.feller_ok());
    }

    #[test]
    fn invalid_scenarios() {
        let s = SimScenario::study(1.0 / 2400.5, 1, 1.5, 1.0, 1);
        assert!(s.validate().is_err());
        let s = SimScenario {
            days: 0,
            ..SimScenario::study(1.0 / 2400.0, 1, 1.5, 1.0, 1)
        };
        assert!(s.validate().is_err());
        let s = SimScenario::study(1.0 / 2400.0, 1, 2.5, 1.0, 1);
        assert!(matches!(s.validate(), Err(Error::Domain(_))));
    }
}

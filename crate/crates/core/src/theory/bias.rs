//! First-order jump bias of the CF estimators for constant stable-like jump
//! coefficients.
//!
//! Two scale conventions for a symmetric β-stable driver are in use. The
//! tail convention takes one-sided components with Lévy density
//! `β x^{−β−1}` on `x > 0`; the CF convention takes `E e^{iuY_t} =
//! exp(−t|u|^β)`. [`cf_to_tail_scale`] converts between them, and
//! [`StableTailParams::symmetric_from_cf`] builds tail-convention
//! coefficients for a CF-standardized `γ Y`.

use serde::{Deserialize, Serialize};

use super::chi::{chi, chi_prime};
use crate::error::{Error, Result};

/// Constant jump coefficients in the tail convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableTailParams {
    pub beta: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasValue {
    /// Bias of the symmetrized estimator.
    pub a: f64,
    /// Bias of the nonsymmetrized estimator.
    pub a_prime: f64,
}

/// `{x}^β = |x|^β sign(x)`.
fn signed_pow(x: f64, beta: f64) -> f64 {
    x.abs().powf(beta) * x.signum()
}

/// Factor `s` such that a CF-standardized symmetric stable process equals in
/// law `s (L⁺ − L⁻)` with tail-standardized one-sided `L^±`.
///
/// Matching the real log-CF slopes gives `2 s^β β χ'(β+1) = 1`.
pub fn cf_to_tail_scale(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(Error::domain(format!(
            "beta must lie in (0, 2), got {beta}"
        )));
    }
    let slope = 2.0 * beta * chi_prime(beta + 1.0)?;
    Ok(slope.powf(-1.0 / beta))
}

impl StableTailParams {
    pub fn new(beta: f64, gamma_plus: f64, gamma_minus: f64) -> Result<Self> {
        let p = Self {
            beta,
            gamma_plus,
            gamma_minus,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 1.0 && self.beta < 2.0) {
            return Err(Error::domain(format!(
                "beta must lie in (1, 2), got {}",
                self.beta
            )));
        }
        if !(self.gamma_plus.is_finite() && self.gamma_minus.is_finite()) {
            return Err(Error::invalid("jump coefficients must be finite"));
        }
        Ok(())
    }

    /// Tail-convention coefficients of `γ Y` with `Y` CF-standardized
    /// symmetric β-stable.
    pub fn symmetric_from_cf(beta: f64, gamma: f64) -> Result<Self> {
        let s = cf_to_tail_scale(beta)? * gamma;
        Self::new(beta, s, -s)
    }

    /// `a = χ(β)(|γ⁺|^β + |γ⁻|^β)`.
    pub fn a(&self) -> Result<f64> {
        Ok(chi(self.beta)?
            * (self.gamma_plus.abs().powf(self.beta) + self.gamma_minus.abs().powf(self.beta)))
    }

    /// `a' = χ'(β)({γ⁺}^β + {γ⁻}^β)`.
    pub fn a_prime(&self) -> Result<f64> {
        let sum = signed_pow(self.gamma_plus, self.beta) + signed_pow(self.gamma_minus, self.beta);
        if sum == 0.0 {
            return Ok(0.0);
        }
        Ok(chi_prime(self.beta)? * sum)
    }
}

/// Bias functionals over `[0, t]` for constant coefficients:
///
/// ```text
/// A(u)  = 2 u^{β−2} Δ^{1−β/2} a t
/// A'(u) = (2/u²) (Δ^{1−β/2} u^β a − log cos(Δ^{1−β/2} u^β a')) t
/// ```
pub fn bias_functionals(
    params: &StableTailParams,
    u: f64,
    delta: f64,
    t: f64,
) -> Result<BiasValue> {
    params.validate()?;
    if !(u > 0.0 && delta > 0.0 && t >= 0.0) {
        return Err(Error::invalid(
            "u, delta must be positive and t nonnegative",
        ));
    }
    let beta = params.beta;
    let a = params.a()?;
    let a_prime = params.a_prime()?;
    let scale = delta.powf(1.0 - beta / 2.0) * u.powf(beta);
    let arg = scale * a_prime;
    if arg.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::domain(
            "bias formula outside validity (cos argument ≥ π/2)",
        ));
    }
    Ok(BiasValue {
        a: 2.0 * u.powf(beta - 2.0) * delta.powf(1.0 - beta / 2.0) * a * t,
        a_prime: 2.0 / (u * u) * (scale * a - arg.cos().ln()) * t,
    })
}

/// `A'(u)` for `σ W + γ Y` with `Y` CF-standardized symmetric stable, in
/// closed form: `2 |γ|^β u^{β−2} Δ^{1−β/2} t`.
pub fn bias_cf_symmetric(beta: f64, gamma: f64, u: f64, delta: f64, t: f64) -> Result<f64> {
    if !(beta > 1.0 && beta < 2.0) {
        return Err(Error::domain(format!(
            "beta must lie in (1, 2), got {beta}"
        )));
    }
    Ok(2.0 * gamma.abs().powf(beta) * u.powf(beta - 2.0) * delta.powf(1.0 - beta / 2.0) * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vanishes_without_jumps() {
        let p = StableTailParams::new(1.5, 0.0, 0.0).unwrap();
        let b = bias_functionals(&p, 1.0, 1.0 / 2400.0, 1.0).unwrap();
        assert_eq!(
            b,
            BiasValue {
                a: 0.0,
                a_prime: 0.0
            }
        );
    }

    #[test]
    fn symmetric_coefficients_agree() {
        let p = StableTailParams::new(1.5, 0.7, -0.7).unwrap();
        assert_eq!(p.a_prime().unwrap(), 0.0);
        let b = bias_functionals(&p, 0.8, 1.0 / 4800.0, 2.0).unwrap();
        assert!((b.a - b.a_prime).abs() < 1e-14 * b.a);
    }

    #[test]
    fn zeta_scaling() {
        let p = StableTailParams::new(1.3, 1.0, -0.5).unwrap();
        let (u, z, d) = (0.9, 1.5, 1.0 / 2400.0);
        let a1 = bias_functionals(&p, u, d, 1.0).unwrap().a;
        let a2 = bias_functionals(&p, z * u, d, 1.0).unwrap().a;
        assert!((a2 - z.powf(1.3 - 2.0) * a1).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_log_cos_term() {
        // One-sided jumps: a' ≠ 0, so the log-cos term adds a positive amount.
        let p = StableTailParams::new(1.5, 1.0, 0.0).unwrap();
        let (u, d) = (1.0, 1.0 / 2400.0);
        let b = bias_functionals(&p, u, d, 1.0).unwrap();
        let linear = 2.0 * d.powf(0.25) * p.a().unwrap();
        assert!(b.a_prime > linear);
    }

    #[test]
    fn outside_validity() {
        let p = StableTailParams::new(1.5, 100.0, 0.0).unwrap();
        assert!(matches!(
            bias_functionals(&p, 10.0, 0.5, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cf_bridge_reproduces_closed_form() {
        for beta in [1.25, 1.5, 1.75] {
            let p = StableTailParams::symmetric_from_cf(beta, 0.5).unwrap();
            for u in [0.5, 1.0] {
                let got = bias_functionals(&p, u, 1.0 / 4800.0, 1.0).unwrap().a_prime;
                let want = bias_cf_symmetric(beta, 0.5, u, 1.0 / 4800.0, 1.0).unwrap();
                assert!(
                    (got - want).abs() < 1e-9 * want,
                    "beta={beta} u={u}: {got} vs {want}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn homogeneous_in_gamma(lambda in 0.1f64..5.0, gp in -2.0f64..2.0, gm in -2.0f64..2.0) {
            let beta = 1.6;
            let p = StableTailParams::new(beta, gp, gm).unwrap();
            let q = StableTailParams::new(beta, lambda * gp, lambda * gm).unwrap();
            let a = bias_functionals(&p, 1.0, 1e-10, 1.0).unwrap().a;
            let b = bias_functionals(&q, 1.0, 1e-10, 1.0).unwrap().a;
            prop_assert!((b - lambda.powf(beta) * a).abs() <= 1e-12 * b.abs().max(1e-300));
        }

        #[test]
        fn decreasing_in_u(u in 0.1f64..3.0) {
            let p = StableTailParams::new(1.5, 1.0, -1.0).unwrap();
            let a1 = bias_functionals(&p, u, 1e-3, 1.0).unwrap().a;
            let a2 = bias_functionals(&p, u * 1.1, 1e-3, 1.0).unwrap().a;
            prop_assert!(a2 < a1);
        }
    }
}

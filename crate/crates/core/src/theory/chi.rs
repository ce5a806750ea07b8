//! The oscillatory constants
//!
//! ```text
//! χ(β)  = ∫₀^∞ sin y / y^β dy,          0 < β < 2,
//! χ'(β) = ∫₀^∞ (1 − cos y) / y^β dy,    1 < β < 3.
//! ```
//!
//! Each integral is split into `[0, 1]`, handled by the termwise-integrated
//! Taylor series of the numerator, `[1, Mπ]`, integrated half-period by
//! half-period with adaptive Gauss–Legendre, and `[Mπ, ∞)`, evaluated from the
//! integration-by-parts expansion of `∫ e^{iy} y^{−s} dy`.

use std::f64::consts::PI;

use serde::Serialize;

use super::quadrature::{adaptive, GaussLegendre};
use crate::error::{Error, Result};

/// Quadrature controls. Halving the step means doubling `splits`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Number of half periods integrated numerically before the tail.
    pub half_periods: usize,
    /// Sub-intervals per half period.
    pub splits: usize,
    /// Gauss–Legendre nodes per sub-interval.
    pub nodes: usize,
    /// Absolute tolerance for the adaptive driver on each piece.
    pub tol: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            half_periods: 64,
            splits: 1,
            nodes: 20,
            tol: 1e-15,
        }
    }
}

/// Largest neglected term allowed in the tail expansion.
const TAIL_TOL: f64 = 1e-10;

/// `∫_a^∞ e^{iy} y^{−s} dy` as `(real, imag)` via
/// `i e^{ia} Σ_m (−i)^m (s)_m a^{−s−m}`, truncated at the smallest term.
fn oscillatory_tail(s: f64, a: f64) -> Result<(f64, f64)> {
    let (sin_a, cos_a) = a.sin_cos();
    // Running term t_m = (s)_m a^{-s-m}, multiplied by (−i)^m.
    let mut term = a.powf(-s);
    let (mut re, mut im) = (0.0, 0.0);
    let mut m = 0usize;
    loop {
        // (−i)^m cycles 1, −i, −1, i.
        let (pr, pi) = match m % 4 {
            0 => (1.0, 0.0),
            1 => (0.0, -1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, 1.0),
        };
        re += pr * term;
        im += pi * term;
        let next = term * (s + m as f64) / a;
        if next.abs() < 1e-18 {
            break;
        }
        if next.abs() > term.abs() || m >= 200 {
            // Asymptotic series: stop at the smallest term if it is small enough.
            if next.abs() < TAIL_TOL {
                break;
            }
            return Err(Error::domain(
                "tail expansion diverges; increase half_periods",
            ));
        }
        m += 1;
        term = next;
    }
    // Multiply (re + i im) by i e^{ia} = i cos a − sin a.
    let real = -sin_a * re - cos_a * im;
    let imag = cos_a * re - sin_a * im;
    Ok((real, imag))
}

/// `∫_1^{Mπ} trig(y) y^{−s} dy` over half periods.
fn oscillatory_body<F: Fn(f64) -> f64>(trig: F, s: f64, opts: &QuadOptions) -> f64 {
    let rule = GaussLegendre::new(opts.nodes);
    let f = |y: f64| trig(y) * y.powf(-s);
    let mut edges = vec![1.0];
    edges.extend((1..=opts.half_periods).map(|k| k as f64 * PI));
    let mut total = 0.0;
    for w in edges.windows(2) {
        let step = (w[1] - w[0]) / opts.splits as f64;
        for j in 0..opts.splits {
            let a = w[0] + j as f64 * step;
            let b = if j + 1 == opts.splits { w[1] } else { a + step };
            total += adaptive(&rule, &f, a, b, opts.tol);
        }
    }
    total
}

fn check_opts(opts: &QuadOptions) -> Result<()> {
    if opts.half_periods < 2 || opts.splits == 0 || opts.nodes == 0 {
        return Err(Error::invalid(
            "quadrature options must be positive (half_periods ≥ 2)",
        ));
    }
    Ok(())
}

/// `∫₀¹ sin y / y^β dy = Σ_k (−1)^k / ((2k+1)! (2k+2−β))`.
fn sine_head(beta: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0; // (2k+1)!
    for k in 0..30 {
        let kf = k as f64;
        if k > 0 {
            fact *= (2.0 * kf) * (2.0 * kf + 1.0);
        }
        let term = 1.0 / (fact * (2.0 * kf + 2.0 - beta));
        sum += if k % 2 == 0 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    sum
}

/// `∫₀¹ (1 − cos y) / y^β dy = Σ_{k≥1} (−1)^{k+1} / ((2k)! (2k+1−β))`.
fn cosine_head(beta: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact = 1.0; // (2k)!
    for k in 1..30 {
        let kf = k as f64;
        fact *= (2.0 * kf - 1.0) * (2.0 * kf);
        let term = 1.0 / (fact * (2.0 * kf + 1.0 - beta));
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    sum
}

pub fn chi_with(beta: f64, opts: &QuadOptions) -> Result<f64> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(Error::domain(format!(
            "chi needs beta in (0, 2), got {beta}"
        )));
    }
    check_opts(opts)?;
    let a = opts.half_periods as f64 * PI;
    let body = oscillatory_body(f64::sin, beta, opts);
    let (_, tail) = oscillatory_tail(beta, a)?;
    Ok(sine_head(beta) + body + tail)
}

/// `χ(β) = ∫₀^∞ sin y / y^β dy` for `β ∈ (0, 2)`.
pub fn chi(beta: f64) -> Result<f64> {
    chi_with(beta, &QuadOptions::default())
}

pub fn chi_prime_with(beta: f64, opts: &QuadOptions) -> Result<f64> {
    if !(beta > 1.0 && beta < 3.0) {
        return Err(Error::domain(format!(
            "chi' needs beta in (1, 3), got {beta}"
        )));
    }
    check_opts(opts)?;
    let a = opts.half_periods as f64 * PI;
    let body = oscillatory_body(f64::cos, beta, opts);
    let (tail, _) = oscillatory_tail(beta, a)?;
    // ∫₁^∞ y^{−β} dy = 1/(β − 1).
    Ok(cosine_head(beta) + 1.0 / (beta - 1.0) - body - tail)
}

/// `χ'(β) = ∫₀^∞ (1 − cos y) / y^β dy` for `β ∈ (1, 3)`.
pub fn chi_prime(beta: f64) -> Result<f64> {
    chi_prime_with(beta, &QuadOptions::default())
}

/// Numerical check of the integration-by-parts identity linking `χ(β)` and
/// `χ'(β + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiRelation {
    pub chi: f64,
    /// `β χ'(β + 1)`.
    pub scaled_chi_prime: f64,
    /// Sign `s` in `χ(β) = s · β χ'(β + 1)`.
    pub sign: f64,
    /// `| |χ(β)| − β χ'(β + 1) |`.
    pub abs_gap: f64,
}

pub fn chi_relation(beta: f64) -> Result<ChiRelation> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(Error::domain(format!(
            "relation needs beta in (0, 2), got {beta}"
        )));
    }
    let c = chi(beta)?;
    let scaled = beta * chi_prime(beta + 1.0)?;
    Ok(ChiRelation {
        chi: c,
        scaled_chi_prime: scaled,
        sign: (c * scaled).signum(),
        abs_gap: (c.abs() - scaled).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    // Composite Simpson, used only on [0, 1] where the integrands vanish at 0.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    #[test]
    fn dirichlet_integral() {
        assert!((chi(1.0).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert!((chi_prime(2.0).unwrap() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn chi_matches_gamma_closed_form() {
        // Γ(1 − β) cos(πβ/2) evaluated by statrs as an independent route.
        for beta in [0.3, 0.7, 1.25, 1.5, 1.75] {
            let gamma = statrs::function::gamma::gamma(1.0 - beta);
            let expect = gamma * (PI * beta / 2.0).cos();
            assert!((chi(beta).unwrap() - expect).abs() < 1e-9, "beta={beta}");
        }
        assert!((chi(1.5).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn head_series_against_simpson() {
        let beta: f64 = 0.5;
        let f = |y: f64| {
            if y == 0.0 {
                0.0
            } else {
                y.sin() / y.powf(beta)
            }
        };
        let s = simpson(f, 0.0, 1.0, 200_000);
        assert!((sine_head(beta) - s).abs() < 1e-6);
        let beta: f64 = 1.5;
        let g = |y: f64| {
            if y == 0.0 {
                0.0
            } else {
                (1.0 - y.cos()) / y.powf(beta)
            }
        };
        assert!((cosine_head(beta) - simpson(g, 0.0, 1.0, 200_000)).abs() < 1e-8);
    }

    #[test]
    fn stable_under_step_halving() {
        let coarse = QuadOptions::default();
        let fine = QuadOptions {
            splits: 2,
            ..coarse
        };
        for beta in [0.5, 1.1, 1.5, 1.9] {
            assert!(
                (chi_with(beta, &coarse).unwrap() - chi_with(beta, &fine).unwrap()).abs() < 1e-8
            );
        }
        for beta in [1.2, 1.5, 2.0, 2.5] {
            let a = chi_prime_with(beta, &coarse).unwrap();
            let b = chi_prime_with(beta, &fine).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn tail_cutoff_does_not_matter() {
        let short = QuadOptions {
            half_periods: 16,
            ..QuadOptions::default()
        };
        assert!((chi_with(1.3, &short).unwrap() - chi(1.3).unwrap()).abs() < 1e-10);
        assert!((chi_prime_with(1.3, &short).unwrap() - chi_prime(1.3).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn positive_and_growing_near_two() {
        let mut prev = 0.0;
        for beta in [1.5, 1.8, 1.9, 1.95, 1.99] {
            let c = chi(beta).unwrap();
            assert!(c > prev && c.is_finite());
            prev = c;
        }
        assert!(prev > 50.0);
        assert!(chi_prime(1.5).unwrap() > 0.0);
    }

    #[test]
    fn domains() {
        assert!(matches!(chi(2.0), Err(Error::Domain(_))));
        assert!(chi(0.0).is_err());
        assert!(matches!(chi_prime(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn relation_holds_up_to_sign() {
        for beta in [1.1, 1.5, 1.9] {
            let r = chi_relation(beta).unwrap();
            assert!(r.abs_gap < 1e-8, "beta={beta} gap={}", r.abs_gap);
            assert_eq!(r.sign, 1.0);
        }
    }
}

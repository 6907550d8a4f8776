//! The propagation constant `a*` and its integrals.
//!
//! With `y = √((1-x)/(1+x))/√a` the three integrals over `[-1, 1]` become
//! integrals over `y ∈ [0, ∞)` against `h`:
//!
//! ```text
//! I_F(a) = ∫ (2a+1)/(1+ay²) h(y) dy - 1/2
//! I_G(a) = ∫ (1-ay²)/(1+ay²) h(y) dy - 1/2
//! I_H(a) = ∫ 2/(1+ay²) h(y) dy
//! ```
//!
//! `I_F` and `I_G` are evaluated both ways and cross-checked; `I_H` only
//! through `y`, since its `x`-integrand blows up at `x = 1`.
//!
//! With `c = 1` and `h₁ = λ`, `a*(λ)` is the common root of
//!
//! ```text
//! -2 - λ I_G(a) = 0,   -1 + (λ-2)a - λ I_F(a) = 0,   (λ-2) - λ I_H(a) = 0.
//! ```

mod fit;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gaussian_tail, Quadrature};
use crate::roots::bisect;
use crate::specfun::{h_raw, SpecFun};

pub use fit::{
    fit_rattling, omega_rows, write_astar_csv, write_omega_csv, RattlingReport, MIN_EVENTS,
};

/// Largest tolerated gap between the two forms of `I_F` or `I_G`.
pub const FORM_AGREEMENT: f64 = 1e-9;
/// Bisection tolerance on `a`.
pub const ROOT_TOL: f64 = 1e-10;

const QUAD: Quadrature = Quadrature {
    abs_tol: 1e-13,
    rel_tol: 1e-13,
    max_intervals: 4000,
};

fn check_a(what: &'static str, a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, format!("a = {a} must be positive")))
    }
}

/// Breakpoints in `x` at `y = cutoff, cutoff/2, …` so the adaptive rule sees
/// where the integrand actually varies.
fn x_breaks(a: f64, cutoff: f64) -> Vec<f64> {
    let mut pts = vec![-1.0];
    let mut y = cutoff;
    while y > 1e-4 {
        let ay2 = a * y * y;
        let x = (1.0 - ay2) / (1.0 + ay2);
        if x > *pts.last().expect("nonempty") && x < 1.0 {
            pts.push(x);
        }
        y *= 0.5;
    }
    pts.push(1.0);
    pts
}

fn x_integral(what: &'static str, a: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let cutoff = SpecFun::default().config().tail_cutoff;
    let mut failure = None;
    let r = QUAD.integrate_with_breaks(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &x_breaks(a, cutoff),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    r.map(|q| q.value).map_err(|e| match e {
        Error::Accuracy { detail, .. } => Error::Accuracy { what, detail },
        other => other,
    })
}

/// `∫₀^∞ w(y) h(y) dy` with `|w| ≤ bound`, truncated at the tail cutoff.
fn y_integral(bound: f64, w: impl Fn(f64) -> f64) -> Result<f64> {
    let cutoff = SpecFun::default().config().tail_cutoff;
    let q = QUAD.integrate_to_cutoff(|y| w(y) * h_raw(y), 0.0, cutoff)?;
    let tail = bound * gaussian_tail(cutoff);
    if tail > QUAD.abs_tol {
        return Err(Error::Accuracy {
            what: "semi-infinite integral",
            detail: format!("truncation error {tail:e} exceeds tolerance"),
        });
    }
    Ok(q.value)
}

/// `I_F` over `[-1, 1]` and through `y`.
pub fn integral_i_f_forms(a: f64) -> Result<(f64, f64)> {
    check_a("integral_i_f", a)?;
    let sf = SpecFun::default();
    let primary = x_integral("I_F", a, |x| sf.big_f(a, x))?;
    let alt = y_integral(2.0 * a + 1.0, |y| (2.0 * a + 1.0) / (1.0 + a * y * y))? - 0.5;
    Ok((primary, alt))
}

/// `I_G` over `[-1, 1]` and through `y`.
pub fn integral_i_g_forms(a: f64) -> Result<(f64, f64)> {
    check_a("integral_i_g", a)?;
    let sf = SpecFun::default();
    let primary = x_integral("I_G", a, |x| sf.big_g(a, x))?;
    let alt = y_integral(1.0, |y| {
        let ay2 = a * y * y;
        (1.0 - ay2) / (1.0 + ay2)
    })? - 0.5;
    Ok((primary, alt))
}

fn agreed(what: &'static str, a: f64, (primary, alt): (f64, f64)) -> Result<f64> {
    if (primary - alt).abs() > FORM_AGREEMENT {
        return Err(Error::Accuracy {
            what,
            detail: format!("forms disagree at a = {a}: {primary} vs {alt}"),
        });
    }
    Ok(primary)
}

/// `I_F(a) = ∫_{-1}^{1} F(a, x) dx`.
pub fn integral_i_f(a: f64) -> Result<f64> {
    agreed("I_F", a, integral_i_f_forms(a)?)
}

/// `I_G(a) = ∫_{-1}^{1} G(a, x) dx`.
pub fn integral_i_g(a: f64) -> Result<f64> {
    agreed("I_G", a, integral_i_g_forms(a)?)
}

/// `I_H(a) = ∫_{-1}^{1} H(a, x) dx`, evaluated through `y`.
pub fn integral_i_h(a: f64) -> Result<f64> {
    check_a("integral_i_h", a)?;
    y_integral(2.0, |y| 2.0 / (1.0 + a * y * y))
}

/// `I_H` straight from the singular `x`-integrand, with breakpoints packed
/// geometrically towards `x = 1`. Slow; meant as a cross-check.
pub fn integral_i_h_raw(a: f64) -> Result<f64> {
    check_a("integral_i_h_raw", a)?;
    let sf = SpecFun::default();
    let mut pts = x_breaks(a, sf.config().tail_cutoff);
    pts.pop();
    let mut d = (1.0 - pts.last().expect("nonempty")) / 2.0;
    while d > 1e-14 {
        pts.push(1.0 - d);
        d /= 4.0;
    }
    let q = Quadrature {
        abs_tol: 1e-11,
        rel_tol: 1e-11,
        max_intervals: 20_000,
    };
    // The last panel is left out; its integrand is about h(0)/√(2a(1-x)).
    let last = *pts.last().expect("nonempty");
    let tail = 2.0 * h_raw(0.0) * (2.0 * (1.0 - last) / a).sqrt() / 2.0;
    let r = q.integrate_with_breaks(|x| sf.big_h(a, x).unwrap_or(0.0), &pts)?;
    Ok(r.value + tail)
}

/// `(2a+1) I_G(a) - 2 I_F(a) + 2a`, which vanishes identically.
pub fn integral_identity_residual(a: f64) -> Result<f64> {
    Ok((2.0 * a + 1.0) * integral_i_g(a)? - 2.0 * integral_i_f(a)? + 2.0 * a)
}

/// Which balance a root comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    /// `-2 - λ I_G(a) = 0`.
    Gradient,
    /// `-1 + (λ-2)a - λ I_F(a) = 0`.
    Value,
    /// `(λ-2) - λ I_H(a) = 0`.
    Rate,
}

impl Balance {
    pub fn residual(self, lambda: f64, a: f64) -> Result<f64> {
        Ok(match self {
            Balance::Gradient => -2.0 - lambda * integral_i_g(a)?,
            Balance::Value => -1.0 + (lambda - 2.0) * a - lambda * integral_i_f(a)?,
            Balance::Rate => (lambda - 2.0) - lambda * integral_i_h(a)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub lambda: f64,
    /// The root of the gradient balance.
    pub a_star: f64,
    pub root_gradient: f64,
    pub root_value: f64,
    pub root_rate: f64,
    pub residual_gradient: f64,
    pub residual_value: f64,
    pub residual_rate: f64,
}

impl AsymptoticConstants {
    pub fn max_disagreement(&self) -> f64 {
        let r = [self.root_gradient, self.root_value, self.root_rate];
        let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// First sign change of `balance` on `1e-6 · 2^k`, refined by bisection.
fn balance_root(balance: Balance, lambda: f64) -> Result<f64> {
    let f = |a: f64| balance.residual(lambda, a);
    let mut lo = 1e-6;
    let mut f_lo = f(lo)?;
    let mut hi = lo;
    loop {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoBracket { lo: 1e-6, hi });
        }
        let f_hi = f(hi)?;
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_lo.signum() != f_hi.signum() {
            break;
        }
        lo = hi;
        f_lo = f_hi;
    }
    bisect(f, lo, hi, ROOT_TOL)
}

/// `a*(λ)` from all three balances.
pub fn solve_a_star(lambda: f64) -> Result<AsymptoticConstants> {
    if !(lambda > 2.0 && lambda.is_finite()) {
        return Err(Error::domain(
            "solve_a_star",
            format!("lambda = {lambda} must exceed 2"),
        ));
    }
    let root_gradient = balance_root(Balance::Gradient, lambda)?;
    let root_value = balance_root(Balance::Value, lambda)?;
    let root_rate = balance_root(Balance::Rate, lambda)?;
    Ok(AsymptoticConstants {
        lambda,
        a_star: root_gradient,
        root_gradient,
        root_value,
        root_rate,
        residual_gradient: Balance::Gradient.residual(lambda, root_gradient)?,
        residual_value: Balance::Value.residual(lambda, root_value)?,
        residual_rate: Balance::Rate.residual(lambda, root_rate)?,
    })
}

/// `F(a, x)`, `G(a, x)` and `H(a, x)` on a uniform grid of `points` values
/// of `x` strictly inside `(-1, 1)`.
pub fn profiles(a: f64, points: usize) -> Result<Vec<[f64; 4]>> {
    check_a("profiles", a)?;
    let sf = SpecFun::default();
    (1..=points)
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / (points + 1) as f64;
            Ok([x, sf.big_f(a, x)?, sf.big_g(a, x)?, sf.big_h(a, x)?])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 7] = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];

    #[test]
    fn forms_agree() {
        for a in GRID {
            let (p, q) = integral_i_f_forms(a).unwrap();
            assert!((p - q).abs() <= FORM_AGREEMENT, "I_F {a}: {p} {q}");
            let (p, q) = integral_i_g_forms(a).unwrap();
            assert!((p - q).abs() <= FORM_AGREEMENT, "I_G {a}: {p} {q}");
            assert!(integral_identity_residual(a).unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn limits_and_signs() {
        let g = integral_i_g(1e-6).unwrap();
        assert!(g > -1e-3 && g < 0.0, "{g}");
        let g = integral_i_g(1e4).unwrap();
        assert!(g > -1.0 && g < -0.95, "{g}");
        let f = integral_i_f(1e-4).unwrap();
        assert!(f > 0.0 && f < 0.01, "{f}");
        let mut prev = 0.0;
        for a in GRID {
            assert!(integral_i_f(a).unwrap() > 0.0);
            assert!(integral_i_h(a).unwrap() > 0.0);
            let g = integral_i_g(a).unwrap();
            assert!(g < prev);
            prev = g;
        }
        assert!(integral_i_g(0.0).is_err());
    }

    #[test]
    fn small_a_slope() {
        let a = 1e-5;
        let g = integral_i_g(a).unwrap();
        assert!((g / a + 2.0).abs() < 1e-3, "{}", g / a);
    }

    #[test]
    fn raw_i_h() {
        let a = 1.0;
        let raw = integral_i_h_raw(a).unwrap();
        assert!((raw - integral_i_h(a).unwrap()).abs() <= 1e-7, "{raw}");
    }

    #[test]
    fn a_star_lambda_10() {
        let k = solve_a_star(10.0).unwrap();
        assert!(k.max_disagreement() <= 1e-8, "{k:?}");
        assert!((k.a_star - 0.1810107).abs() < 1e-6, "{}", k.a_star);
        assert!(solve_a_star(2.0).is_err());
    }
}

//! The Gaussian-tail special functions `h`, `f`, `g` on `[0, ∞)` and the
//! integrands `F(a,·)`, `G(a,·)`, `H(a,·)` on `[-1, 1]` built from them.
//!
//! ```text
//! h(x) = e^{-x²/4} / (2√π)
//! f(x) = 2x ∫_x^∞ y⁻² h(y) dy
//! g(x) = f'(x)
//! ```
//!
//! `g' = h`, `g(0) = -1/2` and `2h + xg - f = 0` give the closed forms
//! `g(x) = -erfc(x/2)/2` and `f(x) = 2h(x) + x g(x)`, which are what the
//! evaluators use. The defining integral of `f` is kept as
//! [`SpecFun::f_by_quadrature`] and is only used to cross-check.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunConfig {
    /// Relative tolerance of the quadrature route for `f`.
    pub quad_rel_tol: f64,
    /// Beyond this argument `f`, `g` and `h` are returned as exactly 0.
    pub tail_cutoff: f64,
}

impl Default for SpecFunConfig {
    fn default() -> Self {
        Self {
            quad_rel_tol: 1e-12,
            tail_cutoff: 40.0,
        }
    }
}

impl SpecFunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.quad_rel_tol > 0.0 && self.quad_rel_tol <= 1e-6) {
            return Err(Error::InvalidConfig(format!(
                "quad_rel_tol must lie in (0, 1e-6], got {}",
                self.quad_rel_tol
            )));
        }
        if !(self.tail_cutoff >= 20.0) {
            return Err(Error::InvalidConfig(format!(
                "tail_cutoff must be at least 20, got {}",
                self.tail_cutoff
            )));
        }
        Ok(())
    }
}

/// Evaluator for the special functions under a fixed [`SpecFunConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpecFun {
    cfg: SpecFunConfig,
}

/// `h` without the domain check. Valid for any real argument.
#[inline]
pub fn h_raw(x: f64) -> f64 {
    (-0.25 * x * x).exp() / (2.0 * PI.sqrt())
}

/// `g` without the domain check or tail cutoff.
#[inline]
pub fn g_raw(x: f64) -> f64 {
    -0.5 * libm::erfc(0.5 * x)
}

/// `f` without the domain check or tail cutoff.
#[inline]
pub fn f_raw(x: f64) -> f64 {
    2.0 * h_raw(x) + x * g_raw(x)
}

/// `√((1-x)/(1+x)) / √a`, the argument shared by `F`, `G` and `H`.
#[inline]
fn scaled_arg(a: f64, x: f64) -> f64 {
    ((1.0 - x) / (1.0 + x)).sqrt() / a.sqrt()
}

fn check_a(func: &'static str, a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("a must be positive, got {a}")))
    }
}

fn check_x(func: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            func,
            format!("argument must be >= 0, got {x}"),
        ))
    }
}

impl SpecFun {
    pub fn new(cfg: SpecFunConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &SpecFunConfig {
        &self.cfg
    }

    pub fn h(&self, x: f64) -> Result<f64> {
        check_x("h", x)?;
        Ok(if x >= self.cfg.tail_cutoff {
            0.0
        } else {
            h_raw(x)
        })
    }

    pub fn g(&self, x: f64) -> Result<f64> {
        check_x("g", x)?;
        Ok(if x >= self.cfg.tail_cutoff {
            0.0
        } else {
            g_raw(x)
        })
    }

    pub fn f(&self, x: f64) -> Result<f64> {
        check_x("f", x)?;
        Ok(if x >= self.cfg.tail_cutoff {
            0.0
        } else {
            f_raw(x)
        })
    }

    /// `f` from its defining integral `2x ∫_x^∞ y⁻² h(y) dy`, truncated at the
    /// tail cutoff. Slow; intended as a reference value.
    pub fn f_by_quadrature(&self, x: f64) -> Result<f64> {
        check_x("f_by_quadrature", x)?;
        if x == 0.0 {
            // 2x · (h(0)/x + O(1)) → 2h(0).
            return Ok(2.0 * h_raw(0.0));
        }
        if x >= self.cfg.tail_cutoff {
            return Ok(0.0);
        }
        // Geometric breakpoints resolve the y⁻² growth near small x.
        let mut pts = vec![x];
        let mut y = x;
        while y < 1.0 {
            y *= 4.0;
            if y < self.cfg.tail_cutoff {
                pts.push(y);
            }
        }
        for s in [2.0, 4.0, 8.0, 16.0] {
            if s > x && s < self.cfg.tail_cutoff {
                pts.push(s);
            }
        }
        pts.push(self.cfg.tail_cutoff);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let q = Quadrature {
            abs_tol: 0.0,
            rel_tol: self.cfg.quad_rel_tol,
            max_intervals: 20_000,
        };
        let r = q.integrate_with_breaks(|y| h_raw(y) / (y * y), &pts)?;
        Ok(2.0 * x * r.value)
    }

    /// `F(a,x) = √a √(1-x²) f(√((1-x)/(1+x))/√a)`, extended by 0 at `x = -1`.
    pub fn big_f(&self, a: f64, x: f64) -> Result<f64> {
        check_a("F", a)?;
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::domain(
                "F",
                format!("x must lie in [-1, 1], got {x}"),
            ));
        }
        if x == -1.0 || x == 1.0 {
            return Ok(0.0);
        }
        let y = scaled_arg(a, x);
        Ok(a.sqrt() * ((1.0 - x) * (1.0 + x)).sqrt() * self.f(y)?)
    }

    /// `G(a,x) = g(√((1-x)/(1+x))/√a)`, extended by 0 at `x = -1`.
    pub fn big_g(&self, a: f64, x: f64) -> Result<f64> {
        check_a("G", a)?;
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::domain(
                "G",
                format!("x must lie in [-1, 1], got {x}"),
            ));
        }
        if x == -1.0 {
            return Ok(0.0);
        }
        self.g(scaled_arg(a, x))
    }

    /// `H(a,x) = h(√((1-x)/(1+x))/√a) / (√a √(1-x²))` on the open interval.
    pub fn big_h(&self, a: f64, x: f64) -> Result<f64> {
        check_a("H", a)?;
        if !(x > -1.0 && x < 1.0) {
            return Err(Error::domain(
                "H",
                format!("x must lie in (-1, 1), got {x}"),
            ));
        }
        let y = scaled_arg(a, x);
        Ok(self.h(y)? / (a.sqrt() * ((1.0 - x) * (1.0 + x)).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf() -> SpecFun {
        SpecFun::default()
    }

    #[test]
    fn point_values() {
        let s = sf();
        let h0 = 1.0 / (2.0 * PI.sqrt());
        assert!((s.h(0.0).unwrap() - 0.282_094_791_773_878_14).abs() < 1e-15);
        assert!((s.h(2.0).unwrap() - (-1f64).exp() * h0).abs() < 1e-16);
        assert_eq!(s.h(40.0).unwrap(), 0.0);
        assert_eq!(s.g(0.0).unwrap(), -0.5);
        assert_eq!(s.g(40.0).unwrap(), 0.0);
        assert!((s.f(0.0).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert_eq!(s.f(40.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        let s = sf();
        assert!(s.h(-0.1).is_err());
        assert!(s.g(-1e-300).is_err());
        assert!(s.f(-2.0).is_err());
        assert!(s.big_f(0.0, 0.0).is_err());
        assert!(s.big_f(1.0, 1.5).is_err());
        assert!(s.big_g(-1.0, 0.0).is_err());
        assert!(s.big_h(1.0, 1.0).is_err());
        assert!(s.big_h(1.0, -1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SpecFun::new(SpecFunConfig {
            quad_rel_tol: 1e-3,
            tail_cutoff: 40.0
        })
        .is_err());
        assert!(SpecFun::new(SpecFunConfig {
            quad_rel_tol: 1e-10,
            tail_cutoff: 10.0
        })
        .is_err());
        assert!(SpecFun::new(SpecFunConfig {
            quad_rel_tol: 1e-10,
            tail_cutoff: 25.0
        })
        .is_ok());
    }

    #[test]
    fn composite_endpoints() {
        let s = sf();
        for a in [0.2, 1.0, 5.0] {
            assert_eq!(s.big_f(a, -1.0).unwrap(), 0.0);
            assert_eq!(s.big_f(a, 1.0).unwrap(), 0.0);
            assert_eq!(s.big_g(a, 1.0).unwrap(), -0.5);
            assert_eq!(s.big_g(a, -1.0).unwrap(), 0.0);
            assert!(s.big_h(a, -1.0 + 1e-12).unwrap().abs() < 1e-12);
        }
        assert!((s.big_f(1.0, 0.0).unwrap() - s.f(1.0).unwrap()).abs() < 1e-16);
        assert!((s.big_g(1.0, 0.0).unwrap() - s.g(1.0).unwrap()).abs() < 1e-16);
        assert!((s.big_h(1.0, 0.0).unwrap() - s.h(1.0).unwrap()).abs() < 1e-16);
        assert!((s.big_h(4.0, 0.0).unwrap() - 0.5 * s.h(0.5).unwrap()).abs() < 1e-16);
    }

    #[test]
    fn f_quadrature_matches_closed_form() {
        let s = sf();
        for x in [1e-8, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let q = s.f_by_quadrature(x).unwrap();
            let c = s.f(x).unwrap();
            assert!((q - c).abs() < 1e-11, "x={x}: {q} vs {c}");
        }
    }
}

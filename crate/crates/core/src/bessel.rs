//! Exponentially scaled modified Bessel functions `e^{-x} I_n(x)` and the
//! lattice heat kernel `e^{-2t} I_n(2t)` built from them.
//!
//! This is an independent route to the discrete Green function: the heat
//! kernel is the time derivative of `Γ_n(t)`, so `∫_0^t e^{-2s} I_n(2s) ds`
//! reproduces `Γ_n(t)` without touching the Fourier integral that
//! [`crate::green`] evaluates. Nothing in the solver path calls this module.

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Largest argument accepted by the series. Beyond this the leading scaled
/// term underflows.
pub const MAX_ARG: f64 = 700.0;

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// `e^{-x} I_n(x)` by the ascending series, summed with the exponential
/// scaling folded into the first term.
pub fn scaled_bessel_i(n: u32, x: f64) -> Result<f64> {
    if !(0.0..=MAX_ARG).contains(&x) {
        return Err(Error::domain(
            "scaled_bessel_i",
            format!("argument must lie in [0, {MAX_ARG}], got {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = (n as f64 * half.ln() - ln_factorial(n) - x).exp();
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        // Terms grow until k ~ x/2, then decay geometrically.
        if (k as f64) > half && term < 1e-17 * sum {
            break;
        }
        if k > 100_000 {
            return Err(Error::Accuracy {
                what: "scaled_bessel_i",
                detail: format!("series did not converge for n={n}, x={x}"),
            });
        }
    }
    Ok(sum)
}

/// `e^{-x} I_k(x)` for `k = 0..=n_max` by Miller's backward recurrence
/// `I_{k-1} = (2k/x) I_k + I_{k+1}`, normalised with the series value of
/// `e^{-x} I_0(x)`.
pub fn scaled_bessel_i_all(n_max: u32, x: f64) -> Result<Vec<f64>> {
    let i0 = scaled_bessel_i(0, x)?;
    let mut out = vec![0.0; n_max as usize + 1];
    out[0] = i0;
    if x == 0.0 {
        return Ok(out);
    }
    // Start well above both n_max and x so the minimal solution dominates.
    let start = (n_max as f64).max(x) as u32 + 40 + (x.sqrt() * 10.0) as u32;
    let mut above = 0.0f64;
    let mut cur = 1e-300f64;
    let mut raw = vec![0.0; n_max as usize + 1];
    let mut k = start;
    while k > 0 {
        let below = (2.0 * k as f64 / x) * cur + above;
        above = cur;
        cur = below;
        k -= 1;
        if k <= n_max {
            raw[k as usize] = cur;
        }
        if cur > 1e250 {
            above *= 1e-250;
            cur *= 1e-250;
            for r in raw.iter_mut() {
                *r *= 1e-250;
            }
        }
    }
    let scale = i0 / raw[0];
    for (o, r) in out.iter_mut().zip(raw) {
        *o = r * scale;
    }
    Ok(out)
}

/// Lattice heat kernel `e^{-2t} I_n(2t)`, the fundamental solution of
/// `v̇_n = Δv_n` with `v_n(0) = δ_{n0}`.
pub fn heat_kernel(n: i64, t: f64) -> Result<f64> {
    scaled_bessel_i(n.unsigned_abs() as u32, 2.0 * t)
}

/// `Γ_n(t)` as the time integral of the heat kernel.
pub fn green_by_time_integral(n: i64, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let q = Quadrature {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_intervals: 10_000,
    };
    let mut failure = None;
    let r = q.integrate(
        |s| match heat_kernel(n, s) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        t,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // I_0(1) = 1.2660658777520082, I_1(1) = 0.5651591039924851, I_2(2) = 0.6889484476987382
        let e1 = (-1f64).exp();
        assert!((scaled_bessel_i(0, 1.0).unwrap() - 1.266_065_877_752_008_2 * e1).abs() < 1e-15);
        assert!((scaled_bessel_i(1, 1.0).unwrap() - 0.565_159_103_992_485_1 * e1).abs() < 1e-15);
        let e2 = (-2f64).exp();
        assert!((scaled_bessel_i(2, 2.0).unwrap() - 0.688_948_447_698_738_2 * e2).abs() < 1e-15);
    }

    #[test]
    fn miller_matches_series() {
        for x in [0.3, 2.0, 17.0, 150.0] {
            let all = scaled_bessel_i_all(30, x).unwrap();
            for n in [0u32, 1, 5, 12, 30] {
                let s = scaled_bessel_i(n, x).unwrap();
                let m = all[n as usize];
                assert!(
                    (s - m).abs() <= 1e-13 * s.max(1e-300) + 1e-300,
                    "n={n} x={x}: {s} vs {m}"
                );
            }
        }
    }

    #[test]
    fn heat_kernel_sums_to_one() {
        // Σ_n e^{-x} I_n(x) = 1.
        for t in [0.5, 4.0, 30.0] {
            let all = scaled_bessel_i_all(400, 2.0 * t).unwrap();
            let total: f64 = all[0] + 2.0 * all[1..].iter().sum::<f64>();
            assert!((total - 1.0).abs() < 1e-13, "t={t}: {total}");
        }
    }

    #[test]
    fn rejects_large_argument() {
        assert!(scaled_bessel_i(0, 800.0).is_err());
    }
}

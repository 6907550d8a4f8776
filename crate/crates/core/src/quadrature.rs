//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_tol, rel_tol * |I|)`. Error estimates use the
//! QUADPACK scaling of `|K15 - G7|`, which stays reliable for the integrable
//! endpoint singularities met in this crate (square-root behaviour at `x = ±1`).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and subdivision limit for [`Quadrature::integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let asc = asc * half.abs();
    let abs_sum = abs_sum * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Segment { a, b, value, error }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadResult> {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrate over `[points[0], points[last]]`, starting from the given
    /// partition. Useful when the caller knows where the integrand is rough.
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        points: &[f64],
    ) -> Result<QuadResult> {
        if points.len() < 2 {
            return Err(Error::domain("integrate", "need at least two points"));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("integrate", "breakpoints must be increasing"));
        }
        let mut heap: BinaryHeap<Segment> = points
            .windows(2)
            .map(|w| kronrod15(&mut f, w[0], w[1]))
            .collect();
        loop {
            let value: f64 = heap.iter().map(|s| s.value).sum();
            let error: f64 = heap.iter().map(|s| s.error).sum();
            if error <= self.abs_tol.max(self.rel_tol * value.abs()) {
                return Ok(QuadResult {
                    value,
                    abs_error: error,
                    intervals: heap.len(),
                });
            }
            if heap.len() >= self.max_intervals {
                return Err(Error::Accuracy {
                    what: "adaptive quadrature",
                    detail: format!(
                        "{} intervals used, error estimate {error:e} on value {value}",
                        heap.len()
                    ),
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if !(worst.a < mid && mid < worst.b) {
                // Interval cannot be split further in floating point.
                let value: f64 = heap.iter().map(|s| s.value).sum::<f64>() + worst.value;
                let error: f64 = heap.iter().map(|s| s.error).sum::<f64>() + worst.error;
                return Err(Error::Accuracy {
                    what: "adaptive quadrature",
                    detail: format!("interval underflow, error {error:e} on value {value}"),
                });
            }
            heap.push(kronrod15(&mut f, worst.a, mid));
            heap.push(kronrod15(&mut f, mid, worst.b));
        }
    }

    /// Integrate `f` over `[a, ∞)` by truncation at `cutoff`. The caller owns
    /// the truncation error; for integrands bounded by a multiple of
    /// `h(y) = e^{-y²/4}/(2√π)` see [`gaussian_tail`].
    pub fn integrate_to_cutoff<F: FnMut(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        cutoff: f64,
    ) -> Result<QuadResult> {
        if cutoff <= a {
            return Ok(QuadResult {
                value: 0.0,
                abs_error: 0.0,
                intervals: 0,
            });
        }
        // The integrands decay on the scale y ~ 1; seed a partition so the
        // adaptive loop does not waste work on the flat tail.
        let mut pts = vec![a];
        let mut x = a.max(0.0);
        for step in [1.0, 2.0, 4.0, 8.0, 16.0] {
            x += step;
            if x < cutoff && x > a {
                pts.push(x);
            }
        }
        pts.push(cutoff);
        pts.dedup();
        self.integrate_with_breaks(f, &pts)
    }
}

/// `∫_L^∞ e^{-y²/4}/(2√π) dy = erfc(L/2)/2`, the truncation error for a unit
/// multiple of the Gaussian kernel.
pub fn gaussian_tail(cutoff: f64) -> f64 {
    0.5 * libm::erfc(0.5 * cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = Quadrature::default();
        let r = q
            .integrate(|x| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0)
            .unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0) + 3.0;
        assert!((r.value - exact).abs() < 1e-13);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let q = Quadrature::new(1e-12, 1e-12);
        let r = q
            .integrate(|x: f64| (1.0 - x * x).sqrt(), -1.0, 1.0)
            .unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        let q = Quadrature::new(1e-10, 1e-10);
        let r = q.integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_to_cutoff() {
        let q = Quadrature::default();
        let r = q
            .integrate_to_cutoff(|y: f64| (-y * y / 4.0).exp(), 0.0, 40.0)
            .unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(gaussian_tail(40.0) < 1e-170);
    }

    #[test]
    fn rejects_bad_breaks() {
        let q = Quadrature::default();
        assert!(q.integrate_with_breaks(|x| x, &[0.0, 0.0, 1.0]).is_err());
        assert!(q.integrate_with_breaks(|x| x, &[0.0]).is_err());
    }
}

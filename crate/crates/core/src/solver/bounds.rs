//! A-posteriori checks of the a-priori bounds every solution obeys:
//!
//! * `u_n(t) ≤ 0`,
//! * `u̇_n(t) ∈ [-(h₁+h₂), h₁-2c]`,
//! * `Δu_n(t) ∈ [-(2h₁+h₂), h₁+h₂-2c]`,
//! * `∇u_n(t_n) ∈ [-(2h₁+h₂), 0]` and `∇u_{n-1}(t_n) ∈ [0, 2h₁+h₂]` at each
//!   switching moment,
//!
//! together with `|u_n(t_n)|` at the switching node.

use serde::{Deserialize, Serialize};

use crate::green::GreenEvaluator;
use crate::relay::ModelParams;

use super::{EventLog, FieldAt};

/// Lattice state `u_n(t)`, `u̇_n(t)` for `n = 0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub u: Vec<f64>,
    pub u_dot: Vec<f64>,
}

/// Largest violation of each bound (0 when satisfied everywhere).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub sign: f64,
    pub rate: f64,
    pub laplacian: f64,
    pub grad_ahead: f64,
    pub grad_behind: f64,
    /// `max |u_n(t_n)|` over logged switches.
    pub switch_residual: f64,
    /// Number of (n, t) samples inspected.
    pub samples: usize,
}

impl BoundsReport {
    pub fn worst(&self) -> f64 {
        [
            self.sign,
            self.rate,
            self.laplacian,
            self.grad_ahead,
            self.grad_behind,
            self.switch_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.worst() <= tol
    }

    fn merge(&mut self, other: &BoundsReport) {
        self.sign = self.sign.max(other.sign);
        self.rate = self.rate.max(other.rate);
        self.laplacian = self.laplacian.max(other.laplacian);
        self.grad_ahead = self.grad_ahead.max(other.grad_ahead);
        self.grad_behind = self.grad_behind.max(other.grad_behind);
        self.switch_residual = self.switch_residual.max(other.switch_residual);
        self.samples += other.samples;
    }
}

fn excess(x: f64, lo: f64, hi: f64) -> f64 {
    (lo - x).max(x - hi).max(0.0)
}

struct Limits {
    rate: (f64, f64),
    laplacian: (f64, f64),
    grad: f64,
}

impl Limits {
    fn new(p: &ModelParams) -> Self {
        Self {
            rate: (-p.jump(), p.drift()),
            laplacian: (-(2.0 * p.h1() + p.h2()), p.jump() - 2.0 * p.c()),
            grad: 2.0 * p.h1() + p.h2(),
        }
    }
}

/// Check a logged solution through its closed form.
///
/// Samples every node up to a few past the reach of the horizon at each
/// event time (both one-sided rates), midway between consecutive events and
/// at the horizon.
pub fn check_runtime_bounds(log: &EventLog, green: &GreenEvaluator) -> BoundsReport {
    let p = &log.params;
    let lim = Limits::new(p);
    let max_node = p.reach(log.horizon) as i64 + 4;
    let mut times: Vec<f64> = log.events.iter().map(|e| e.time).collect();
    times.dedup();
    let mut grid: Vec<(f64, bool)> = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        if t > 0.0 {
            grid.push((t, true));
        }
        grid.push((t, false));
        let next = times.get(i + 1).copied().unwrap_or(log.horizon);
        if next > t {
            grid.push((0.5 * (t + next), false));
        }
    }
    if log.horizon > *times.last().unwrap_or(&0.0) {
        grid.push((log.horizon, false));
    }

    let mut report = BoundsReport::default();
    for &(t, left) in &grid {
        let field = FieldAt::new(p, &log.events, green, t, max_node as u64 + 1, left);
        for n in 0..=max_node {
            let u = field.u(n);
            let lap = field.u(n - 1) - 2.0 * u + field.u(n + 1);
            report.sign = report.sign.max(u);
            report.rate = report
                .rate
                .max(excess(field.u_dot(n), lim.rate.0, lim.rate.1));
            report.laplacian = report
                .laplacian
                .max(excess(lap, lim.laplacian.0, lim.laplacian.1));
            report.samples += 1;
        }
    }
    for e in &log.events {
        let field = FieldAt::new(p, &log.events, green, e.time, e.node + 1, false);
        let n = e.node as i64;
        let u = field.u(n);
        report.switch_residual = report.switch_residual.max(u.abs());
        report.grad_ahead = report
            .grad_ahead
            .max(excess(field.u(n + 1) - u, -lim.grad, 0.0));
        if n > 0 {
            report.grad_behind = report
                .grad_behind
                .max(excess(u - field.u(n - 1), 0.0, lim.grad));
        }
    }
    report
}

/// Check a sampled trajectory of the half lattice `n = 0..len`.
///
/// The last node is skipped for the Laplacian since its right neighbour is
/// not part of the snapshot. Gradients at switching moments are checked for
/// every node that switches between consecutive snapshots.
pub fn check_snapshots(
    params: &ModelParams,
    log: &EventLog,
    snapshots: &[Snapshot],
) -> BoundsReport {
    let lim = Limits::new(params);
    let mut report = BoundsReport::default();
    for s in snapshots {
        let len = s.u.len();
        for n in 0..len {
            report.sign = report.sign.max(s.u[n]);
            report.rate = report.rate.max(excess(s.u_dot[n], lim.rate.0, lim.rate.1));
            if n + 1 < len {
                let left = if n == 0 { s.u[1] } else { s.u[n - 1] };
                let lap = left - 2.0 * s.u[n] + s.u[n + 1];
                report.laplacian =
                    report
                        .laplacian
                        .max(excess(lap, lim.laplacian.0, lim.laplacian.1));
            }
            report.samples += 1;
        }
    }
    for e in log.events.iter().skip(1) {
        let Some(s) = snapshots
            .iter()
            .find(|s| (s.time - e.time).abs() <= log.meta.simultaneity_window)
        else {
            continue;
        };
        let n = e.node as usize;
        if n + 1 >= s.u.len() {
            continue;
        }
        let r = BoundsReport {
            switch_residual: s.u[n].abs(),
            grad_ahead: excess(s.u[n + 1] - s.u[n], -lim.grad, 0.0),
            grad_behind: excess(s.u[n] - s.u[n - 1], 0.0, lim.grad),
            ..BoundsReport::default()
        };
        report.merge(&r);
    }
    report
}

//! Compare a simulated log with the asymptotic theory.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::PatternSet;
use crate::solver::EventLog;

use super::{integral_i_f, integral_i_g, AsymptoticConstants};

/// Fewest events `fit_rattling` accepts.
pub const MIN_EVENTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RattlingReport {
    /// Leading coefficient of `t_k ≈ a k² + b k` over the upper half of events.
    pub measured_a: f64,
    /// The linear coefficient `b` of the same fit.
    pub measured_b: f64,
    /// `p(n)/n` at the largest switched node `n`.
    pub measured_p_star: f64,
    /// Largest switched node.
    pub resolved_node: u64,
    pub predicted_p_star: f64,
    pub predicted_a: f64,
    /// `-c + (h₁-2c)a - (h₁+h₂) p I_F(a)` at the measured `a`, `p`.
    pub residual_value: f64,
    /// `-2c - (h₁+h₂) p I_G(a)` at the measured `a`, `p`.
    pub residual_gradient: f64,
    /// `max |t_k - a k²| / k` over all logged `k ≥ 1`.
    pub max_omega_over_k: f64,
    /// `min (t_{k_i} - t_{k_{i-1}}) / k_i` over consecutive switched nodes.
    pub min_gap_ratio: f64,
}

/// Least squares for `t = a k² + b k`.
fn fit_quadratic(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let (mut s4, mut s3, mut s2, mut t2, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(k, t) in points {
        let k2 = k * k;
        s4 += k2 * k2;
        s3 += k2 * k;
        s2 += k2;
        t2 += t * k2;
        t1 += t * k;
    }
    let det = s4 * s2 - s3 * s3;
    if !(det.abs() > f64::EPSILON * s4 * s2) {
        return Err(Error::Insufficient("fit window is degenerate".into()));
    }
    Ok(((t2 * s2 - t1 * s3) / det, (s4 * t1 - s3 * t2) / det))
}

pub fn fit_rattling(log: &EventLog, consts: &AsymptoticConstants) -> Result<RattlingReport> {
    if log.events.len() < MIN_EVENTS {
        return Err(Error::Insufficient(format!(
            "{} events logged, need at least {MIN_EVENTS}",
            log.events.len()
        )));
    }
    let p = &log.params;
    let window: Vec<(f64, f64)> = log.events[log.events.len() / 2..]
        .iter()
        .map(|e| (e.node as f64, e.time))
        .collect();
    let (a, b) = fit_quadratic(&window)?;

    let set = PatternSet::from_log(log);
    let n = set.resolved();
    let p_star = set.count_p(n) as f64 / n as f64;

    let residual_value = -p.c() + p.drift() * a - p.jump() * p_star * integral_i_f(a)?;
    let residual_gradient = -2.0 * p.c() - p.jump() * p_star * integral_i_g(a)?;

    let max_omega_over_k = log
        .events
        .iter()
        .filter(|e| e.node > 0)
        .map(|e| {
            let k = e.node as f64;
            (e.time - a * k * k).abs() / k
        })
        .fold(0.0, f64::max);
    let mut by_node: Vec<(u64, f64)> = log.events.iter().map(|e| (e.node, e.time)).collect();
    by_node.sort_unstable_by_key(|e| e.0);
    let min_gap_ratio = by_node
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / w[1].0 as f64)
        .fold(f64::INFINITY, f64::min);

    Ok(RattlingReport {
        measured_a: a,
        measured_b: b,
        measured_p_star: p_star,
        resolved_node: n,
        predicted_p_star: p.h1() / p.jump(),
        predicted_a: consts.a_star,
        residual_value,
        residual_gradient,
        max_omega_over_k,
        min_gap_ratio,
    })
}

/// Rows `(k, t_k, t_k - a k²)` for every logged node.
pub fn omega_rows(log: &EventLog, a: f64) -> Vec<(u64, f64, f64)> {
    log.events
        .iter()
        .map(|e| {
            let k = e.node as f64;
            (e.node, e.time, e.time - a * k * k)
        })
        .collect()
}

pub fn write_omega_csv<W: Write>(log: &EventLog, a: f64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "t_k", "omega_k"])?;
    for (k, t, omega) in omega_rows(log, a) {
        w.write_record([k.to_string(), t.to_string(), omega.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `lambda,a_star_value,a_star_gradient,a_star_rate,max_disagreement`.
pub fn write_astar_csv<W: Write>(rows: &[AsymptoticConstants], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "lambda",
        "a_star_value",
        "a_star_gradient",
        "a_star_rate",
        "max_disagreement",
    ])?;
    for k in rows {
        w.write_record([
            k.lambda.to_string(),
            k.root_value.to_string(),
            k.root_gradient.to_string(),
            k.root_rate.to_string(),
            k.max_disagreement().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relay::ModelParams;
    use crate::solver::{Method, SolverMeta, SwitchEvent};

    fn synthetic(a: f64, b: f64, nodes: impl Iterator<Item = u64>) -> EventLog {
        let events: Vec<SwitchEvent> = nodes
            .map(|n| {
                let k = n as f64;
                SwitchEvent {
                    node: n,
                    time: if n == 0 { 0.0 } else { a * k * k + b * k },
                }
            })
            .collect();
        EventLog {
            params: ModelParams::new(1.0, 1.0, 0.1).unwrap(),
            horizon: events.last().unwrap().time,
            events,
            meta: SolverMeta {
                method: Method::EventDriven,
                time_tol: 1e-9,
                value_tol: 1e-7,
                simultaneity_window: 1e-8,
                lattice_halfwidth: None,
            },
        }
    }

    #[test]
    fn recovers_exact_quadratic() {
        let log = synthetic(0.2, 0.7, (0..60).map(|i| 2 * i));
        let k = super::super::solve_a_star(10.0).unwrap();
        let r = fit_rattling(&log, &k).unwrap();
        assert!((r.measured_a - 0.2).abs() < 1e-12);
        assert!((r.measured_b - 0.7).abs() < 1e-9);
        assert_eq!(r.resolved_node, 118);
        assert_eq!(r.measured_p_star, 58.0 / 118.0);
        assert_eq!(r.predicted_p_star, 0.5);
        assert!(r.max_omega_over_k <= 0.7 + 1e-9);
    }

    #[test]
    fn needs_events() {
        let log = synthetic(0.2, 0.0, 0..10);
        let k = super::super::solve_a_star(10.0).unwrap();
        assert!(matches!(
            fit_rattling(&log, &k),
            Err(Error::Insufficient(_))
        ));
    }

    #[test]
    fn omega_csv() {
        let log = synthetic(0.2, 0.0, 0..3);
        let mut buf = Vec::new();
        write_omega_csv(&log, 0.2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,t_k,omega_k\n0,0,0\n1,0.2,0\n"));
    }
}

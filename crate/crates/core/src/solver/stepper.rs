//! Truncated-lattice time-stepper, used to cross-check the event-driven solver.
//!
//! The symmetric solution is integrated on `n = 0..=N` only, with the
//! reflected stencil `Δu_0 = 2(u_1 - u_0)`. Beyond `N` the ghost node follows
//! the switch-free evolution `u_{N+1}(t) = -c(N+1)² + (h₁-2c)t`; this closure
//! ignores the Green tails of the switched sources, which are below rounding
//! once `N` exceeds the front by a dozen diffusion lengths (see
//! [`default_halfwidth`]).
//!
//! Integration uses the Dormand–Prince 5(4) pair with absolute error control
//! at `value_tol / 10` per step. Relays switch exactly at located crossings:
//! after an accepted step shows a sign change, the crossing is found by
//! Brent's method applied to the one-step map `τ ↦ y(t + τ)`, and the state is
//! restarted from there with the new relay outputs.

use crate::error::{Error, Result};
use crate::relay::ModelParams;
use crate::roots::brent;

use super::{bounds::Snapshot, EventLog, Horizon, Method, SolverConfig, SolverMeta, SwitchEvent};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Half-width large enough that (a) no node at `|n| ≥ N` can switch before
/// `horizon` and (b) the ghost closure error is negligible.
pub fn default_halfwidth(params: &ModelParams, horizon: f64) -> u64 {
    params.reach(horizon) + (14.0 * horizon.max(0.0).sqrt()).ceil() as u64 + 20
}

/// Right-hand side of the half lattice `n = 0..=N`.
pub fn half_lattice_rhs(
    params: &ModelParams,
    t: f64,
    u: &[f64],
    switched: &[bool],
    out: &mut [f64],
) {
    let last = u.len() - 1;
    let ghost = {
        let m = (last + 1) as f64;
        -params.c() * m * m + params.drift() * t
    };
    for n in 0..=last {
        let left = if n == 0 { u[1] } else { u[n - 1] };
        let right = if n == last { ghost } else { u[n + 1] };
        let relay = if switched[n] {
            -params.h2()
        } else {
            params.h1()
        };
        out[n] = left - 2.0 * u[n] + right + relay;
    }
}

struct Stepper<'a> {
    params: ModelParams,
    switched: &'a [bool],
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(params: ModelParams, switched: &'a [bool], len: usize) -> Self {
        Self {
            params,
            switched,
            k: std::array::from_fn(|_| vec![0.0; len]),
            tmp: vec![0.0; len],
        }
    }

    fn rhs(&mut self, stage: usize, t: f64) {
        let (params, switched) = (self.params, self.switched);
        half_lattice_rhs(&params, t, &self.tmp, switched, &mut self.k[stage]);
    }

    /// One Dormand–Prince step; returns the max-norm error estimate.
    fn step(&mut self, t: f64, y: &[f64], h: f64, out: &mut [f64]) -> f64 {
        let n = y.len();
        self.tmp.copy_from_slice(y);
        self.rhs(0, t);
        for i in 0..n {
            self.tmp[i] = y[i] + h * A21 * self.k[0][i];
        }
        self.rhs(1, t + C2 * h);
        for i in 0..n {
            self.tmp[i] = y[i] + h * (A31 * self.k[0][i] + A32 * self.k[1][i]);
        }
        self.rhs(2, t + C3 * h);
        for i in 0..n {
            self.tmp[i] = y[i] + h * (A41 * self.k[0][i] + A42 * self.k[1][i] + A43 * self.k[2][i]);
        }
        self.rhs(3, t + C4 * h);
        for i in 0..n {
            self.tmp[i] = y[i]
                + h * (A51 * self.k[0][i]
                    + A52 * self.k[1][i]
                    + A53 * self.k[2][i]
                    + A54 * self.k[3][i]);
        }
        self.rhs(4, t + C5 * h);
        for i in 0..n {
            self.tmp[i] = y[i]
                + h * (A61 * self.k[0][i]
                    + A62 * self.k[1][i]
                    + A63 * self.k[2][i]
                    + A64 * self.k[3][i]
                    + A65 * self.k[4][i]);
        }
        self.rhs(5, t + h);
        for i in 0..n {
            out[i] = y[i]
                + h * (B1 * self.k[0][i]
                    + B3 * self.k[2][i]
                    + B4 * self.k[3][i]
                    + B5 * self.k[4][i]
                    + B6 * self.k[5][i]);
        }
        self.tmp.copy_from_slice(out);
        self.rhs(6, t + h);
        let mut err = 0.0f64;
        for i in 0..n {
            let e = h
                * (E1 * self.k[0][i]
                    + E3 * self.k[2][i]
                    + E4 * self.k[3][i]
                    + E5 * self.k[4][i]
                    + E6 * self.k[5][i]
                    + E7 * self.k[6][i]);
            err = err.max(e.abs());
        }
        err
    }
}

/// Integrate the truncated lattice and log its switching moments.
pub fn run_time_stepper(
    params: &ModelParams,
    cfg: &SolverConfig,
    lattice_halfwidth: u64,
) -> Result<EventLog> {
    run_time_stepper_with_snapshots(params, cfg, lattice_halfwidth).map(|(log, _)| log)
}

/// As [`run_time_stepper`], also returning the lattice state just before and
/// just after every switching batch (node values and right-hand sides).
pub fn run_time_stepper_with_snapshots(
    params: &ModelParams,
    cfg: &SolverConfig,
    lattice_halfwidth: u64,
) -> Result<(EventLog, Vec<Snapshot>)> {
    cfg.validate()?;
    let big_n = lattice_halfwidth as usize;
    if big_n < 2 {
        return Err(Error::InvalidConfig(
            "lattice_halfwidth must be >= 2".into(),
        ));
    }
    if let Horizon::Time(t) = cfg.horizon {
        if params.earliest_switch(lattice_halfwidth as i64) <= t {
            return Err(Error::InvalidConfig(format!(
                "lattice half-width {lattice_halfwidth} too small for horizon {t}: \
                 boundary node could switch"
            )));
        }
    }
    let tol = cfg.value_tol / 10.0;
    let mut switched = vec![false; big_n + 1];
    switched[0] = true;
    let mut y: Vec<f64> = (0..=big_n).map(|n| -params.c() * (n * n) as f64).collect();
    let mut y1 = vec![0.0; big_n + 1];
    let mut events = vec![SwitchEvent { node: 0, time: 0.0 }];
    let mut snapshots = Vec::new();
    let mut t = 0.0f64;
    let mut h = 1e-3f64;
    let t_end = match cfg.horizon {
        Horizon::Time(t) => t,
        Horizon::Events(_) => f64::INFINITY,
    };
    let snapshot = |t: f64, y: &[f64], switched: &[bool]| {
        let mut rate = vec![0.0; y.len()];
        half_lattice_rhs(params, t, y, switched, &mut rate);
        Snapshot {
            time: t,
            u: y.to_vec(),
            u_dot: rate,
        }
    };

    loop {
        if let Horizon::Events(n) = cfg.horizon {
            if events.len() >= n {
                break;
            }
        }
        if t >= t_end {
            break;
        }
        let h_try = h.min(t_end - t);
        if h_try < 1e-13 * t.max(1.0) {
            return Err(Error::StepUnderflow {
                time: t,
                step: h_try,
            });
        }
        let err = Stepper::new(*params, &switched, big_n + 1).step(t, &y, h_try, &mut y1);
        let ratio = err / tol;
        if ratio > 1.0 {
            h = h_try * (0.9 * ratio.powf(-0.2)).max(0.2);
            continue;
        }
        let crossers: Vec<usize> = (1..=big_n)
            .filter(|&n| !switched[n] && y1[n] >= 0.0)
            .collect();
        if crossers.is_empty() {
            t += h_try;
            std::mem::swap(&mut y, &mut y1);
            h = h_try
                * if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-0.2)).min(5.0)
                };
            continue;
        }
        if let Some(&n) = crossers.iter().find(|&&n| n == big_n) {
            return Err(Error::BoundarySwitch {
                node: n as i64,
                time: t + h_try,
            });
        }

        // Locate every crossing inside the accepted step.
        let mut located = Vec::with_capacity(crossers.len());
        let mut scratch = vec![0.0; big_n + 1];
        for &n in &crossers {
            let mut stepper = Stepper::new(*params, &switched, big_n + 1);
            let tau = brent(
                |tau| {
                    if tau <= 0.0 {
                        return Ok(y[n]);
                    }
                    stepper.step(t, &y, tau, &mut scratch);
                    Ok(scratch[n])
                },
                0.0,
                h_try,
                y[n],
                y1[n],
                0.1 * cfg.time_tol,
                200,
            )?;
            located.push((n, tau));
        }
        let first = located
            .iter()
            .map(|&(_, tau)| tau)
            .fold(f64::INFINITY, f64::min);
        let mut batch: Vec<(usize, f64)> = located
            .into_iter()
            .filter(|&(_, tau)| tau <= first + cfg.simultaneity_window)
            .collect();
        batch.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

        if first > 0.0 {
            Stepper::new(*params, &switched, big_n + 1).step(t, &y, first, &mut y1);
            std::mem::swap(&mut y, &mut y1);
        }
        t += first;
        snapshots.push(snapshot(t, &y, &switched));
        for &(n, tau) in &batch {
            switched[n] = true;
            events.push(SwitchEvent {
                node: n as u64,
                time: t - first + tau,
            });
        }
        snapshots.push(snapshot(t, &y, &switched));
        h = h.min(h_try).max(1e-6);
    }

    let horizon = match cfg.horizon {
        Horizon::Time(t) => t,
        Horizon::Events(_) => events.last().map_or(0.0, |e| e.time),
    };
    let log = EventLog {
        params: *params,
        horizon,
        events,
        meta: SolverMeta {
            method: Method::TimeStepper,
            time_tol: cfg.time_tol,
            value_tol: cfg.value_tol,
            simultaneity_window: cfg.simultaneity_window,
            lattice_halfwidth: Some(lattice_halfwidth),
        },
    };
    log.validate()?;
    Ok((log, snapshots))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflected_stencil_matches_full_lattice() {
        let p = ModelParams::new(1.0, 0.5, 0.1).unwrap();
        let big_n = 12usize;
        let half: Vec<f64> = (0..=big_n)
            .map(|n| -0.1 * (n * n) as f64 + 0.3 * (n % 3) as f64)
            .collect();
        let mut switched = vec![false; big_n + 1];
        switched[0] = true;
        switched[3] = true;
        let mut out = vec![0.0; big_n + 1];
        half_lattice_rhs(&p, 2.0, &half, &switched, &mut out);
        // Full lattice on [-N, N] with the same ghost closure at both ends.
        let full: Vec<f64> = (-(big_n as i64)..=big_n as i64)
            .map(|n| half[n.unsigned_abs() as usize])
            .collect();
        let ghost = -0.1 * ((big_n + 1) * (big_n + 1)) as f64 + p.drift() * 2.0;
        for (i, n) in (-(big_n as i64)..=big_n as i64).enumerate() {
            let l = if i == 0 { ghost } else { full[i - 1] };
            let r = if i == full.len() - 1 {
                ghost
            } else {
                full[i + 1]
            };
            let relay = if switched[n.unsigned_abs() as usize] {
                -p.h2()
            } else {
                p.h1()
            };
            let v = l - 2.0 * full[i] + r + relay;
            assert!((v - out[n.unsigned_abs() as usize]).abs() < 1e-14);
        }
    }

    #[test]
    fn initial_rates() {
        let p = ModelParams::new(1.0, 0.3, 0.1).unwrap();
        let u: Vec<f64> = (0..=10).map(|n| -0.1 * (n * n) as f64).collect();
        let mut switched = vec![false; 11];
        switched[0] = true;
        let mut out = vec![0.0; 11];
        half_lattice_rhs(&p, 0.0, &u, &switched, &mut out);
        assert!((out[0] - (-2.0 * 0.1 - 0.3)).abs() < 1e-15);
        for n in 1..10 {
            assert!((out[n] - (1.0 - 0.2)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_small_lattice() {
        let p = ModelParams::new(1.0, 0.0, 0.1).unwrap();
        let cfg = SolverConfig::with_horizon(Horizon::Time(100.0));
        assert!(run_time_stepper(&p, &cfg, 5).is_err());
    }
}

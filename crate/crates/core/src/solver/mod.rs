//! Solutions of the lattice problem `u̇_n = Δu_n + H(u_n)`, `u_n(0) = -cn²`.
//!
//! Two independent routes produce an [`EventLog`] of switching moments:
//!
//! * [`run_event_driven`] evaluates the closed-form solution
//!   `u_n(t) = -cn² + (h₁-2c)t - (h₁+h₂) Σ_{k∈S(t)} Γ_{n-k}(t-t_k)` and jumps
//!   from one switching moment to the next;
//! * [`run_time_stepper`] integrates a truncated lattice with an adaptive
//!   Runge–Kutta scheme and detects threshold crossings.
//!
//! The solution is even in `n`, so logs carry one row per symmetric pair.

mod bounds;
mod event_driven;
mod io;
mod stepper;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::{panels_for, GreenEvaluator, Source, Superposition};
use crate::relay::ModelParams;

pub use bounds::{check_runtime_bounds, check_snapshots, BoundsReport, Snapshot};
pub use event_driven::run_event_driven;
pub use io::{
    read_events_csv, read_meta_json, write_events_csv, write_meta_json, LogMeta, FORMAT_VERSION,
};
pub use stepper::{
    default_halfwidth, half_lattice_rhs, run_time_stepper, run_time_stepper_with_snapshots,
};

/// Node `n ≥ 0` switching at `time`; `-n` switches at the same moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub node: u64,
    pub time: f64,
}

/// When a run stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    /// Simulate up to this time.
    Time(f64),
    /// Simulate until this many events (including node 0) are logged.
    Events(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Absolute tolerance on switching times.
    pub time_tol: f64,
    /// Tolerance on `u` at detected crossings and for the bound checks.
    pub value_tol: f64,
    pub horizon: Horizon,
    /// Refuse to track more than this many candidate nodes at once.
    pub max_candidates: usize,
    /// Crossings within this window of the earliest one form a single batch.
    pub simultaneity_window: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_tol: 1e-9,
            value_tol: 1e-7,
            horizon: Horizon::Events(50),
            max_candidates: 100_000,
            simultaneity_window: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn with_horizon(horizon: Horizon) -> Self {
        Self {
            horizon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_tol > 0.0 && self.value_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if !(self.simultaneity_window >= self.time_tol) {
            return Err(Error::InvalidConfig(format!(
                "simultaneity_window ({}) must be >= time_tol ({})",
                self.simultaneity_window, self.time_tol
            )));
        }
        match self.horizon {
            Horizon::Time(t) if !(t > 0.0 && t.is_finite()) => Err(Error::InvalidConfig(format!(
                "time horizon must be positive, got {t}"
            ))),
            Horizon::Events(0) => Err(Error::InvalidConfig("event horizon must be >= 1".into())),
            _ if self.max_candidates == 0 => {
                Err(Error::InvalidConfig("max_candidates must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    EventDriven,
    TimeStepper,
}

/// Tolerances and method recorded alongside a log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub method: Method,
    pub time_tol: f64,
    pub value_tol: f64,
    pub simultaneity_window: f64,
    /// Half-width of the truncated lattice (time-stepper only).
    pub lattice_halfwidth: Option<u64>,
}

/// Ordered switching moments of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub params: ModelParams,
    /// Time up to which the log is complete.
    pub horizon: f64,
    pub events: Vec<SwitchEvent>,
    pub meta: SolverMeta,
}

impl EventLog {
    /// Events with `time ≤ t`.
    pub fn switched_by(&self, t: f64) -> impl Iterator<Item = &SwitchEvent> {
        self.events.iter().filter(move |e| e.time <= t)
    }

    /// `#S(t)` counting both members of every symmetric pair.
    pub fn switched_count(&self, t: f64) -> usize {
        self.switched_by(t)
            .map(|e| if e.node == 0 { 1 } else { 2 })
            .sum()
    }

    pub fn nodes(&self) -> Vec<u64> {
        self.events.iter().map(|e| e.node).collect()
    }

    pub fn time_of(&self, node: u64) -> Option<f64> {
        self.events.iter().find(|e| e.node == node).map(|e| e.time)
    }

    /// The first `count` events, with the horizon moved to the last kept one.
    pub fn truncated(&self, count: usize) -> EventLog {
        let events: Vec<SwitchEvent> = self.events.iter().take(count).copied().collect();
        let horizon = events.last().map_or(0.0, |e| e.time).min(self.horizon);
        EventLog {
            params: self.params,
            horizon,
            events,
            meta: self.meta,
        }
    }

    /// Structural invariants: node 0 at time 0, sorted times, distinct
    /// nodes, the lower bound `t_n ≥ c n²/(h₁-2c)` within `time_tol`, and
    /// no event past the horizon.
    pub fn validate(&self) -> Result<()> {
        let first = self
            .events
            .first()
            .ok_or_else(|| Error::Invariant("log is empty".into()))?;
        if first.node != 0 || first.time != 0.0 {
            return Err(Error::Invariant(
                "log must start with node 0 at time 0".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for w in self.events.windows(2) {
            if w[1].time < w[0].time {
                return Err(Error::Invariant(format!(
                    "events out of order: node {} at {} after node {} at {}",
                    w[1].node, w[1].time, w[0].node, w[0].time
                )));
            }
        }
        for e in &self.events {
            if !seen.insert(e.node) {
                return Err(Error::Invariant(format!("node {} logged twice", e.node)));
            }
            let bound = self.params.earliest_switch(e.node as i64);
            if e.time < bound - self.meta.time_tol {
                return Err(Error::Invariant(format!(
                    "node {} switched at {} before its lower bound {}",
                    e.node, e.time, bound
                )));
            }
            if e.time > self.horizon + self.meta.time_tol {
                return Err(Error::Invariant(format!(
                    "node {} switched at {} past the horizon {}",
                    e.node, e.time, self.horizon
                )));
            }
        }
        Ok(())
    }
}

/// The closed-form solution at one time, for all nodes at once.
#[derive(Debug, Clone)]
pub struct FieldAt {
    params: ModelParams,
    time: f64,
    sum: Superposition,
}

impl FieldAt {
    /// Build the field at time `t` from the events with `time ≤ t`, resolving
    /// node indices up to `max_node`. With `left_limit`, events exactly at
    /// `t` are excluded, which gives `u̇(t-0)`; values are the same either way.
    pub fn new(
        params: &ModelParams,
        events: &[SwitchEvent],
        green: &GreenEvaluator,
        t: f64,
        max_node: u64,
        left_limit: bool,
    ) -> Self {
        let weight = -params.jump();
        let sources: Vec<Source> = events
            .iter()
            .filter(|e| if left_limit { e.time < t } else { e.time <= t })
            .map(|e| Source {
                node: e.node,
                elapsed: t - e.time,
                weight,
            })
            .collect();
        let max_src = sources.iter().map(|s| s.node).max().unwrap_or(0);
        let panels = panels_for(t, max_node + max_src + 1);
        Self {
            params: *params,
            time: t,
            sum: green.superpose(&sources, panels),
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// `u_n(t)`.
    pub fn u(&self, n: i64) -> f64 {
        let nf = n as f64;
        -self.params.c() * nf * nf + self.params.drift() * self.time + self.sum.value(n)
    }

    /// `u̇_n(t)` (right limit unless the field was built as a left limit).
    pub fn u_dot(&self, n: i64) -> f64 {
        self.params.drift() + self.sum.rate(n)
    }
}

/// `u_n(t)` from the closed-form solution, using the events of `log` with
/// `t_k ≤ t` and both members of every symmetric pair.
pub fn u_value(n: i64, t: f64, log: &EventLog, green: &GreenEvaluator) -> f64 {
    FieldAt::new(&log.params, &log.events, green, t, n.unsigned_abs(), false).u(n)
}

/// Switching moments in physical time `τ = ε² t` (the values scale as
/// `v_n = ε² u_n`). Node sets do not depend on `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledLog {
    pub epsilon: f64,
    pub events: Vec<RescaledEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledEvent {
    pub node: u64,
    pub time: f64,
    pub tau: f64,
}

pub fn rescale_events(log: &EventLog, epsilon: f64) -> Result<RescaledLog> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let e2 = epsilon * epsilon;
    Ok(RescaledLog {
        epsilon,
        events: log
            .events
            .iter()
            .map(|e| RescaledEvent {
                node: e.node,
                time: e.time,
                tau: e2 * e.time,
            })
            .collect(),
    })
}

//! Exact event-driven solver.
//!
//! Between switching moments the solution is given in closed form, so the
//! only work is locating the next moment at which an unswitched node reaches
//! 0. The search keeps a frontier `s` up to which every candidate is
//! certified negative and pushes it forward using the a-priori rate bounds
//! `-(h₁+h₂) ≤ u̇_n ≤ h₁-2c`:
//!
//! * from a value `u(s) < 0` the node cannot reach 0 before `s + |u(s)|/(h₁-2c)`;
//! * from a value `u(s') < 0` it cannot have been at 0 after `s' - |u(s')|/(h₁+h₂)`.
//!
//! Since `ü_n = Δu̇_n`, the same bounds give `|ü_n| ≤ 2((h₁-2c) + (h₁+h₂))`,
//! which turns the slopes at both ends into two more (usually longer)
//! clearance windows. When the forward and backward windows overlap,
//! `[s, s']` is clear. Trial points come from a
//! Newton prediction using `u̇`, capped at 5% of the current time; a sign
//! change is refined with Brent's method to `time_tol`.

use crate::error::{Error, Result};
use crate::green::GreenEvaluator;
use crate::relay::ModelParams;
use crate::roots::brent;

use super::{EventLog, FieldAt, Horizon, Method, SolverConfig, SolverMeta, SwitchEvent};

const MAX_ITERATIONS: usize = 2_000_000;
const MAX_TIME: f64 = 1e12;

struct Search<'a> {
    params: ModelParams,
    cfg: &'a SolverConfig,
    green: GreenEvaluator,
    events: Vec<SwitchEvent>,
    switched: Vec<bool>,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: f64,
    u: f64,
    ud: f64,
}

struct Bracket {
    node: u64,
    lo: f64,
    hi: f64,
    u_lo: f64,
    u_hi: f64,
}

impl Search<'_> {
    fn is_switched(&self, n: u64) -> bool {
        self.switched.get(n as usize).copied().unwrap_or(false)
    }

    fn mark(&mut self, n: u64) {
        let i = n as usize;
        if i >= self.switched.len() {
            self.switched.resize(i + 1, false);
        }
        self.switched[i] = true;
    }

    fn field(&self, t: f64, max_node: u64) -> FieldAt {
        FieldAt::new(&self.params, &self.events, &self.green, t, max_node, false)
    }

    fn u_single(&self, n: u64, t: f64) -> f64 {
        self.field(t, n + 1).u(n as i64)
    }

    /// Longest `τ` with `u(s + τ) < 0` guaranteed from a sample at `s`.
    fn forward_clearance(&self, x: &Sample) -> f64 {
        let b = self.curvature_bound();
        let quad = (-x.ud + (x.ud * x.ud - 2.0 * b * x.u).sqrt()) / b;
        (-x.u / self.params.drift()).max(quad)
    }

    /// Longest `τ` with `u(s' - τ) < 0` guaranteed from a sample at `s'`.
    fn backward_clearance(&self, x: &Sample) -> f64 {
        let b = self.curvature_bound();
        let quad = (x.ud + (x.ud * x.ud - 2.0 * b * x.u).sqrt()) / b;
        (-x.u / self.params.jump()).max(quad)
    }

    fn curvature_bound(&self) -> f64 {
        2.0 * (self.params.drift() + self.params.jump())
    }

    fn candidates(&self, t: f64) -> Result<Vec<u64>> {
        let reach = self.params.reach(t);
        let c: Vec<u64> = (1..=reach).filter(|&n| !self.is_switched(n)).collect();
        if c.len() > self.cfg.max_candidates {
            return Err(Error::InvalidConfig(format!(
                "{} candidate nodes at t = {t} exceed max_candidates = {}",
                c.len(),
                self.cfg.max_candidates
            )));
        }
        Ok(c)
    }

    /// `[a.t, b.t]` is crossing-free for a node with these end samples.
    fn certified(&self, a: &Sample, b: &Sample) -> bool {
        a.u < 0.0
            && b.u < 0.0
            && b.t - a.t <= self.forward_clearance(a) + self.backward_clearance(b)
    }

    /// Bisect `[s, s']` for every node whose end samples do not certify it,
    /// sharing one field evaluation per midpoint. Pieces shorter than
    /// `time_tol` are accepted. Returns the leftmost sign change per node.
    fn deep_check(&self, pending: Vec<(u64, Sample, Sample)>) -> Vec<Bracket> {
        let mut found: Vec<Bracket> = Vec::new();
        let mut stack = vec![pending];
        while let Some(group) = stack.pop() {
            let group: Vec<(u64, Sample, Sample)> = group
                .into_iter()
                .filter(|(n, a, b)| {
                    !found.iter().any(|f| f.node == *n)
                        && !self.certified(a, b)
                        && b.t - a.t >= self.cfg.time_tol
                })
                .collect();
            let Some(&(_, a0, b0)) = group.first() else {
                continue;
            };
            let mid = 0.5 * (a0.t + b0.t);
            let max_node = group.iter().map(|g| g.0).max().unwrap_or(0);
            let field = self.field(mid, max_node + 1);
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for (n, a, b) in group {
                let m = Sample {
                    t: mid,
                    u: field.u(n as i64),
                    ud: field.u_dot(n as i64),
                };
                if m.u >= 0.0 {
                    found.push(Bracket {
                        node: n,
                        lo: a.t,
                        hi: mid,
                        u_lo: a.u,
                        u_hi: m.u,
                    });
                } else {
                    left.push((n, a, m));
                    right.push((n, m, b));
                }
            }
            stack.push(right);
            stack.push(left);
        }
        found
    }

    /// Find the next batch of switchings after time `start`, or `None` if
    /// `t_end` is reached first.
    fn next_batch(&self, start: f64, t_end: Option<f64>) -> Result<Option<Vec<SwitchEvent>>> {
        let mut s = start;
        let mut iterations = 0usize;
        loop {
            iterations += 1;
            if iterations > MAX_ITERATIONS || s > MAX_TIME {
                return Err(Error::NoProgress {
                    time: s,
                    detail: format!("no switching found after {iterations} trial steps"),
                });
            }
            let cap = (0.05 * s).max(0.05);
            let reach_hi = self.params.reach(s + cap) + 1;
            let here = self.field(s, reach_hi);
            let cands = self.candidates(s + cap)?;

            let mut at_s = Vec::with_capacity(cands.len());
            let mut step = f64::INFINITY;
            for &n in &cands {
                let u = here.u(n as i64);
                if u >= 0.0 {
                    // Already on the threshold at the frontier.
                    return Ok(Some(vec![SwitchEvent { node: n, time: s }]));
                }
                let x = Sample {
                    t: s,
                    u,
                    ud: here.u_dot(n as i64),
                };
                let cert = self.forward_clearance(&x);
                let newton = if x.ud > 0.0 { -u / x.ud } else { f64::INFINITY };
                step = step.min(cert.max(1.02 * newton + self.cfg.time_tol));
                at_s.push((n, x));
            }
            let mut next = s + step.min(cap).max(self.cfg.time_tol);
            if let Some(end) = t_end {
                next = next.min(end);
            }
            if next <= s {
                return Ok(None);
            }

            let there = self.field(next, reach_hi);
            let mut brackets = Vec::new();
            let mut pending = Vec::new();
            for &(n, x) in &at_s {
                let y = Sample {
                    t: next,
                    u: there.u(n as i64),
                    ud: there.u_dot(n as i64),
                };
                if y.u >= 0.0 {
                    brackets.push(Bracket {
                        node: n,
                        lo: s,
                        hi: next,
                        u_lo: x.u,
                        u_hi: y.u,
                    });
                } else if !self.certified(&x, &y) {
                    pending.push((n, x, y));
                }
            }
            if !pending.is_empty() {
                brackets.extend(self.deep_check(pending));
            }

            if brackets.is_empty() {
                if t_end.is_some_and(|end| next >= end) {
                    return Ok(None);
                }
                s = next;
                continue;
            }

            let mut roots = Vec::with_capacity(brackets.len());
            for b in brackets {
                let n = b.node;
                let root = brent(
                    |t| Ok(self.u_single(n, t)),
                    b.lo,
                    b.hi,
                    b.u_lo,
                    b.u_hi,
                    self.cfg.time_tol,
                    200,
                )?;
                roots.push(SwitchEvent {
                    node: n,
                    time: root,
                });
            }
            let first = roots.iter().map(|e| e.time).fold(f64::INFINITY, f64::min);
            let mut batch: Vec<SwitchEvent> = roots
                .into_iter()
                .filter(|e| e.time <= first + self.cfg.simultaneity_window)
                .collect();
            batch.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.node.cmp(&b.node)));
            return Ok(Some(batch));
        }
    }
}

/// Run the exact event-driven solver from `u_n(0) = -cn²` until the horizon.
pub fn run_event_driven(params: &ModelParams, cfg: &SolverConfig) -> Result<EventLog> {
    cfg.validate()?;
    let mut search = Search {
        params: *params,
        cfg,
        green: GreenEvaluator::default(),
        events: vec![SwitchEvent { node: 0, time: 0.0 }],
        switched: vec![true],
    };
    let t_end = match cfg.horizon {
        Horizon::Time(t) => Some(t),
        Horizon::Events(_) => None,
    };
    let mut last = 0.0;
    loop {
        if let Horizon::Events(n) = cfg.horizon {
            if search.events.len() >= n {
                break;
            }
        }
        let Some(batch) = search.next_batch(last, t_end)? else {
            break;
        };
        for e in &batch {
            let u = search.u_single(e.node, e.time);
            if u.abs() > cfg.value_tol {
                return Err(Error::Invariant(format!(
                    "node {} accepted at t = {} with u = {u:e} (value_tol {:e})",
                    e.node, e.time, cfg.value_tol
                )));
            }
        }
        for e in batch {
            search.mark(e.node);
            search.events.push(e);
            last = e.time;
        }
    }
    let horizon = match cfg.horizon {
        Horizon::Time(t) => t,
        Horizon::Events(_) => last,
    };
    let log = EventLog {
        params: *params,
        horizon,
        events: search.events,
        meta: SolverMeta {
            method: Method::EventDriven,
            time_tol: cfg.time_tol,
            value_tol: cfg.value_tol,
            simultaneity_window: cfg.simultaneity_window,
            lattice_halfwidth: None,
        },
    };
    log.validate()?;
    Ok(log)
}

//! Browser bindings: switching-pattern generation, the `F`/`G`/`H` profiles
//! at `a*(λ)`, and short event-driven runs.
//!
//! Every export has a plain Rust twin returning `Result<_, String>` so the
//! logic is testable off the browser.

use rattling::analysis::{fit_rattling, profiles, solve_a_star, MIN_EVENTS};
use rattling::patterns::gen_quasiperiodic;
use rattling::solver::{run_event_driven, Horizon, SolverConfig};
use rattling::ModelParams;
use wasm_bindgen::prelude::*;

/// Largest pattern the page may request.
pub const MAX_NODES: u32 = 100_000;
/// Longest run the page may request.
pub const MAX_EVENTS: u32 = 150;

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Membership flags for `0..=n_max` followed by the quasi-uniformity metric
/// at the largest member (NaN when undefined).
pub fn pattern_values(alpha: f64, beta: f64, n_max: u32) -> Result<Vec<f64>, String> {
    if n_max == 0 || n_max > MAX_NODES {
        return Err(format!("n_max must lie in [1, {MAX_NODES}]"));
    }
    let set = gen_quasiperiodic(alpha, beta, n_max as u64).map_err(|e| e.to_string())?;
    let mut out: Vec<f64> = (0..=n_max as i64)
        .map(|n| if set.contains(n) { 1.0 } else { 0.0 })
        .collect();
    let metric = set
        .positive_nodes()
        .last()
        .and_then(|&n| set.quasi_uniformity_metric(n).ok())
        .unwrap_or(f64::NAN);
    out.push(metric);
    Ok(out)
}

/// `[a*, x₀, F₀, G₀, H₀, x₁, …]` for `points` abscissae in `(-1, 1)`.
pub fn profile_values(lambda: f64, points: u32) -> Result<Vec<f64>, String> {
    if !(2..=2000).contains(&points) {
        return Err("points must lie in [2, 2000]".into());
    }
    let k = solve_a_star(lambda).map_err(|e| e.to_string())?;
    let rows = profiles(k.a_star, points as usize).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(1 + 4 * rows.len());
    out.push(k.a_star);
    out.extend(rows.iter().flatten());
    Ok(out)
}

/// `[measured_a, a*, node₀, t₀, node₁, t₁, …]`. The fitted coefficient is
/// NaN for runs shorter than the fit needs.
pub fn simulation_values(h1: f64, h2: f64, c: f64, events: u32) -> Result<Vec<f64>, String> {
    if events == 0 || events > MAX_EVENTS {
        return Err(format!("events must lie in [1, {MAX_EVENTS}]"));
    }
    let p = ModelParams::new(h1, h2, c).map_err(|e| e.to_string())?;
    let cfg = SolverConfig::with_horizon(Horizon::Events(events as usize));
    let log = run_event_driven(&p, &cfg).map_err(|e| e.to_string())?;
    let k = solve_a_star(p.lambda()).map_err(|e| e.to_string())?;
    let a = if log.events.len() >= MIN_EVENTS {
        fit_rattling(&log, &k)
            .map_err(|e| e.to_string())?
            .measured_a
    } else {
        f64::NAN
    };
    let mut out = vec![a, k.a_star];
    for e in &log.events {
        out.extend([e.node as f64, e.time]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn pattern(alpha: f64, beta: f64, n_max: u32) -> Result<Vec<f64>, JsError> {
    js(pattern_values(alpha, beta, n_max))
}

#[wasm_bindgen]
pub fn profile(lambda: f64, points: u32) -> Result<Vec<f64>, JsError> {
    js(profile_values(lambda, points))
}

#[wasm_bindgen]
pub fn simulate(h1: f64, h2: f64, c: f64, events: u32) -> Result<Vec<f64>, JsError> {
    js(simulation_values(h1, h2, c, events))
}

use rattling::analysis::{fit_rattling, solve_a_star, write_omega_csv};
use rattling::patterns::PatternSet;
use rattling::solver::{
    read_events_csv, read_meta_json, rescale_events, run_event_driven, write_events_csv,
    write_meta_json, Horizon, LogMeta, SolverConfig, FORMAT_VERSION,
};
use rattling::ModelParams;

fn run(h2: f64, events: usize) -> rattling::solver::EventLog {
    let p = ModelParams::new(1.0, h2, 0.1).unwrap();
    run_event_driven(&p, &SolverConfig::with_horizon(Horizon::Events(events))).unwrap()
}

#[test]
fn log_survives_csv_and_json() {
    let log = run(0.5, 25);
    let mut csv = Vec::new();
    write_events_csv(&log, None, &mut csv).unwrap();
    let mut json = Vec::new();
    let meta = LogMeta::of(&log);
    write_meta_json(&meta, &mut json).unwrap();

    let events = read_events_csv(csv.as_slice()).unwrap();
    let meta = read_meta_json(json.as_slice()).unwrap();
    assert_eq!(meta.format_version, FORMAT_VERSION);
    assert_eq!(meta.into_log(events).unwrap(), log);
}

#[test]
fn time_and_event_horizons_agree() {
    let by_events = run(1.0, 30);
    let p = by_events.params;
    let cfg = SolverConfig::with_horizon(Horizon::Time(by_events.horizon + 1e-3));
    let by_time = run_event_driven(&p, &cfg).unwrap();
    assert_eq!(by_time.nodes(), by_events.nodes());
    for (a, b) in by_time.events.iter().zip(&by_events.events) {
        assert!((a.time - b.time).abs() <= 2e-9);
    }
}

#[test]
fn rescaled_times_scale_quadratically() {
    let log = run(0.0, 20);
    let r = rescale_events(&log, 0.5).unwrap();
    for (e, s) in log.events.iter().zip(&r.events) {
        assert!((s.tau - 0.25 * e.time).abs() <= 1e-15 * e.time.max(1.0));
    }
}

#[test]
fn pattern_and_fit_from_simulation() {
    let log = run(1.0, 40);
    let set = PatternSet::from_log(&log);
    assert!(set.positive_nodes().iter().skip(1).all(|n| n % 2 == 0));
    let k = solve_a_star(10.0).unwrap();
    let r = fit_rattling(&log, &k).unwrap();
    assert_eq!(r.predicted_p_star, 0.5);
    assert!((r.measured_a - k.a_star).abs() / k.a_star < 0.02);
    let mut out = Vec::new();
    write_omega_csv(&log, r.measured_a, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 41);
}

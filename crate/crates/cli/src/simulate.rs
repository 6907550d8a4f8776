use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use rattling::analysis::{fit_rattling, solve_a_star, write_omega_csv, MIN_EVENTS};
use rattling::solver::{
    check_runtime_bounds, check_snapshots, default_halfwidth, run_event_driven,
    run_time_stepper_with_snapshots, write_events_csv, write_meta_json, BoundsReport, EventLog,
    FieldAt, Horizon, LogMeta, SolverConfig,
};
use rattling::{GreenEvaluator, ModelParams};

use crate::outcome::{create, write_json, Failure, Outcome};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    EventDriven,
    TimeStepper,
}

#[derive(clap::Args)]
pub struct Args {
    /// Relay output before switching.
    #[arg(long, default_value_t = 1.0)]
    h1: f64,
    /// Magnitude of the relay output after switching.
    #[arg(long, default_value_t = 0.0)]
    h2: f64,
    /// Curvature of the initial profile -c n².
    #[arg(long, default_value_t = 0.1)]
    c: f64,
    /// Stop after this many events, node 0 included.
    #[arg(long, conflicts_with = "time")]
    events: Option<usize>,
    /// Stop at this time.
    #[arg(long)]
    time: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::EventDriven)]
    method: MethodArg,
    /// Absolute tolerance on switching times.
    #[arg(long, default_value_t = 1e-9)]
    time_tol: f64,
    /// Tolerance on u at crossings and in the bound checks.
    #[arg(long, default_value_t = 1e-7)]
    value_tol: f64,
    /// Crossings this close to the earliest one switch together [default: 10 time-tol].
    #[arg(long)]
    window: Option<f64>,
    /// Half-width of the truncated lattice (time-stepper only) [default: from the horizon].
    #[arg(long)]
    halfwidth: Option<u64>,
    /// Add the column tau = epsilon² t to the events file.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Write a profile file with u_n(t) at this many times.
    #[arg(long, default_value_t = 0)]
    dense_times: usize,
    /// Record the wall-clock time in events.json.
    #[arg(long)]
    timestamp: bool,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn stepper_halfwidth(params: &ModelParams, horizon: Horizon) -> Result<u64, Failure> {
    let t = match horizon {
        Horizon::Time(t) => t,
        Horizon::Events(n) => {
            // Guess the horizon from t_n ≈ a* n² with n ≈ events / p*.
            let a = solve_a_star(params.lambda())?.a_star;
            let node = n as f64 * params.jump() / params.h1() + 2.0;
            1.5 * a * node * node + 10.0
        }
    };
    Ok(default_halfwidth(params, t))
}

fn write_profile(log: &EventLog, times: usize, out: &std::path::Path) -> Outcome {
    let green = GreenEvaluator::default();
    let max_node = log.params.reach(log.horizon) + 10;
    let mut w = create(out, "profile.csv")?;
    writeln!(w, "n,t,u")?;
    for i in 1..=times {
        let t = log.horizon * i as f64 / times as f64;
        let field = FieldAt::new(&log.params, &log.events, &green, t, max_node, false);
        for n in 0..=max_node as i64 {
            writeln!(w, "{n},{t},{}", field.u(n))?;
        }
    }
    w.flush()?;
    Ok(())
}

fn worst_violation(bounds: &BoundsReport, tol: f64) -> Outcome {
    if bounds.within(tol) {
        Ok(())
    } else {
        Err(Failure::Invariant(format!(
            "a-priori bound violated by {:e} (value-tol {tol:e}), see bounds.json",
            bounds.worst()
        )))
    }
}

pub fn run(args: Args) -> Outcome {
    let params = ModelParams::new(args.h1, args.h2, args.c)?;
    let horizon = match (args.events, args.time) {
        (_, Some(t)) => Horizon::Time(t),
        (Some(n), None) => Horizon::Events(n),
        (None, None) => Horizon::Events(50),
    };
    let cfg = SolverConfig {
        time_tol: args.time_tol,
        value_tol: args.value_tol,
        horizon,
        simultaneity_window: args.window.unwrap_or(10.0 * args.time_tol),
        ..SolverConfig::default()
    };
    cfg.validate()?;
    if let Some(eps) = args.epsilon {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Failure::Config(format!(
                "epsilon must be positive, got {eps}"
            )));
        }
    }

    let (log, bounds) = match args.method {
        MethodArg::EventDriven => {
            let log = run_event_driven(&params, &cfg)?;
            let bounds = check_runtime_bounds(&log, &GreenEvaluator::default());
            (log, bounds)
        }
        MethodArg::TimeStepper => {
            let n = match args.halfwidth {
                Some(n) => n,
                None => stepper_halfwidth(&params, horizon)?,
            };
            let (log, snaps) = run_time_stepper_with_snapshots(&params, &cfg, n)?;
            let bounds = check_snapshots(&params, &log, &snaps);
            (log, bounds)
        }
    };

    let out = &args.out;
    let mut w = create(out, "events.csv")?;
    write_events_csv(&log, args.epsilon, &mut w)?;
    w.flush()?;
    let mut meta = LogMeta::of(&log);
    if args.timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        meta.timestamp = Some(format!("{secs}"));
    }
    let mut w = create(out, "events.json")?;
    write_meta_json(&meta, &mut w)?;
    w.flush()?;
    write_json(out, "bounds.json", &bounds)?;

    let max_node = log.events.iter().map(|e| e.node).max().unwrap_or(0);
    println!(
        "{} events up to t = {}, largest switched node {max_node}",
        log.events.len(),
        log.horizon
    );
    if log.events.len() >= MIN_EVENTS {
        let consts = solve_a_star(params.lambda())?;
        let report = fit_rattling(&log, &consts)?;
        write_json(out, "report.json", &report)?;
        let mut w = create(out, "omega.csv")?;
        write_omega_csv(&log, report.measured_a, &mut w)?;
        w.flush()?;
        println!(
            "measured a = {:.6} (a* = {:.6}), measured p* = {:.6} (predicted {:.6})",
            report.measured_a, report.predicted_a, report.measured_p_star, report.predicted_p_star
        );
    } else {
        println!("fewer than {MIN_EVENTS} events: no fit report");
    }
    if args.dense_times > 0 {
        write_profile(&log, args.dense_times, out)?;
    }
    println!("worst bound violation {:e}", bounds.worst());
    worst_violation(&bounds, cfg.value_tol)
}

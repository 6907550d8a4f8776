use std::io::Write;
use std::path::PathBuf;

use rattling::patterns::{
    check_periodic_window, write_membership_csv, write_metric_csv, BuiltPattern, PatternSet,
    PatternSpec,
};
use serde::Serialize;

use crate::outcome::{create, parse_list, write_json, Failure, Outcome};

#[derive(clap::Args)]
pub struct Args {
    /// Quasiperiodic pattern: n is a member iff ⌊nα+β⌋ > ⌊(n-1)α+β⌋.
    #[arg(long, conflicts_with_all = ["explicit", "spec", "counterexample"])]
    alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
    /// Comma-separated positive members.
    #[arg(long, value_parser = parse_list::<u64>, conflicts_with_all = ["spec", "counterexample"])]
    explicit: Option<std::vec::Vec<u64>>,
    /// Read the pattern description from a JSON file.
    #[arg(long, conflicts_with = "counterexample")]
    spec: Option<PathBuf>,
    /// Build the slowly oscillating counterexample.
    #[arg(long)]
    counterexample: bool,
    #[arg(long, default_value_t = 12)]
    levels: usize,
    /// Resolve membership on [1, nmax].
    #[arg(long, default_value_t = 1000)]
    nmax: u64,
    /// Check that every window of p1+p2 nodes holds exactly p1 members, as "p1,p2".
    #[arg(long, value_parser = parse_list::<u64>)]
    window: Option<std::vec::Vec<u64>>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Serialize)]
struct Summary {
    nmax: u64,
    members: usize,
    p_nmax: u64,
    density: f64,
    last_member: Option<u64>,
    metric_at_last_member: Option<f64>,
    window: Option<[u64; 2]>,
    window_holds: Option<bool>,
}

fn spec_from(args: &Args) -> Result<PatternSpec, Failure> {
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)?;
        return Ok(serde_json::from_str(&text)?);
    }
    if args.counterexample {
        return Ok(PatternSpec {
            counterexample_levels: Some(args.levels),
            ..PatternSpec::default()
        });
    }
    if let Some(nodes) = &args.explicit {
        return Ok(PatternSpec {
            explicit_nodes: Some(nodes.clone()),
            ..PatternSpec::default()
        });
    }
    match args.alpha {
        Some(alpha) => Ok(PatternSpec {
            alpha: Some(alpha),
            beta: args.beta,
            ..PatternSpec::default()
        }),
        None => Err(Failure::Config(
            "give one of --alpha, --explicit, --spec, --counterexample".into(),
        )),
    }
}

fn finite(set: &PatternSet, args: &Args) -> Outcome {
    let out = &args.out;
    let mut w = create(out, "membership.csv")?;
    write_membership_csv(set, &mut w)?;
    w.flush()?;
    let mut w = create(out, "metric.csv")?;
    write_metric_csv(set, &mut w)?;
    w.flush()?;

    let window = match args.window.as_deref() {
        None => None,
        Some(&[p1, p2]) if p1 >= 1 => Some([p1, p2]),
        Some(w) => {
            return Err(Failure::Config(format!(
                "--window needs p1,p2 with p1 >= 1, got {w:?}"
            )))
        }
    };
    let window_holds = match window {
        Some([p1, p2]) if args.nmax > p1 + p2 => {
            Some(check_periodic_window(set, p1, p2, 1, args.nmax - p1 - p2))
        }
        Some(_) => return Err(Failure::Config("--nmax too small for the window".into())),
        None => None,
    };
    let last = set.positive_nodes().last().copied();
    let metric = match last {
        Some(n) if set.count_p(n) >= 1 => Some(set.quasi_uniformity_metric(n)?),
        _ => None,
    };
    let p = set.count_p(args.nmax);
    let summary = Summary {
        nmax: args.nmax,
        members: set.positive_nodes().len(),
        p_nmax: p,
        density: p as f64 / args.nmax as f64,
        last_member: last,
        metric_at_last_member: metric,
        window,
        window_holds,
    };
    write_json(out, "summary.json", &summary)?;
    println!(
        "{} positive members in [1, {}], p(nmax)/nmax = {}",
        summary.members, args.nmax, summary.density
    );
    if let (Some(n), Some(m)) = (last, metric) {
        println!("quasi-uniformity metric at n = {n}: {m}");
    }
    if let (Some([p1, p2]), Some(ok)) = (window, window_holds) {
        println!("window ({p1},{p2}): {}", if ok { "holds" } else { "fails" });
    }
    Ok(())
}

pub fn run(args: Args) -> Outcome {
    if args.nmax == 0 {
        return Err(Failure::Config("--nmax must be positive".into()));
    }
    match spec_from(&args)?.build(args.nmax)? {
        BuiltPattern::Finite(set) => finite(&set, &args),
        BuiltPattern::Counterexample(big) => {
            let rows = big.summary()?;
            let mut w = create(&args.out, "counterexample.csv")?;
            writeln!(w, "level,block_end,p,density,metric")?;
            for r in &rows {
                let metric = if r.metric.is_nan() {
                    String::new()
                } else {
                    r.metric.to_string()
                };
                writeln!(
                    w,
                    "{},{},{},{},{metric}",
                    r.level, r.block_end, r.p, r.density
                )?;
            }
            w.flush()?;
            for r in rows.iter().filter(|r| !r.metric.is_nan()) {
                println!(
                    "level {:>2}: M_j has {:>3} digits, m_j/M_j = {:.6}, metric = {:.6}",
                    r.level,
                    r.block_end.len(),
                    r.density,
                    r.metric
                );
            }
            Ok(())
        }
    }
}

use std::io::Write;
use std::path::PathBuf;

use rattling::analysis::{profiles, solve_a_star, write_astar_csv};

use crate::outcome::{parse_list, Failure, Outcome};

/// Values of `a` for the F/G/H profile table.
const PROFILE_A: [f64; 3] = [0.2, 1.0, 5.0];

#[derive(clap::Args)]
pub struct Args {
    /// Comma-separated values of λ = h₁/c, each > 2.
    #[arg(long, default_value = "3,5,10,50", value_parser = parse_list::<f64>)]
    lambda: std::vec::Vec<f64>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write F, G, H profiles at a = 1/5, 1, 5 to this file.
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// Number of x points in the profile table.
    #[arg(long, default_value_t = 199)]
    points: usize,
}

pub fn run(args: Args) -> Outcome {
    if let Some(bad) = args.lambda.iter().find(|&&l| !(l > 2.0)) {
        return Err(Failure::Config(format!("lambda must exceed 2, got {bad}")));
    }
    let rows = args
        .lambda
        .iter()
        .map(|&l| solve_a_star(l))
        .collect::<Result<Vec<_>, _>>()?;
    match &args.out {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            write_astar_csv(&rows, &mut f)?;
            f.flush()?;
        }
        None => write_astar_csv(&rows, std::io::stdout().lock())?,
    }
    if let Some(path) = &args.profiles {
        let tables = PROFILE_A
            .iter()
            .map(|&a| profiles(a, args.points))
            .collect::<Result<Vec<_>, _>>()?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        write!(f, "x")?;
        for name in ["F", "G", "H"] {
            for a in PROFILE_A {
                write!(f, ",{name}_a{a}")?;
            }
        }
        writeln!(f)?;
        for i in 0..args.points {
            write!(f, "{}", tables[0][i][0])?;
            for col in 1..=3 {
                for t in &tables {
                    write!(f, ",{}", t[i][col])?;
                }
            }
            writeln!(f)?;
        }
        f.flush()?;
    }
    Ok(())
}

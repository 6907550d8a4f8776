use clap::ValueEnum;
use rattling::analysis::{
    integral_i_f_forms, integral_i_g_forms, integral_identity_residual, solve_a_star,
};
use rattling::bessel::{green_by_time_integral, heat_kernel};
use rattling::patterns::gen_quasiperiodic;
use rattling::specfun::SpecFun;
use rattling::GreenEvaluator;

use crate::outcome::{Failure, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Group {
    Specfun,
    Green,
    Integrals,
    Astar,
    Patterns,
}

const ALL: [Group; 5] = [
    Group::Specfun,
    Group::Green,
    Group::Integrals,
    Group::Astar,
    Group::Patterns,
];

#[derive(clap::Args)]
pub struct Args {
    /// Run only these groups (repeatable) [default: all].
    #[arg(long, value_enum)]
    group: Vec<Group>,
    /// Tighten every tolerance to at most this value.
    #[arg(long)]
    strict: Option<f64>,
}

struct Check {
    name: &'static str,
    worst: f64,
    tol: f64,
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().map(f64::abs).fold(0.0, f64::max)
}

fn specfun() -> Result<Vec<Check>, Failure> {
    let sf = SpecFun::default();
    let xs = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
    let mut identity = Vec::new();
    let mut oracle = Vec::new();
    for x in xs {
        identity.push(2.0 * sf.h(x)? + x * sf.g(x)? - sf.f(x)?);
        oracle.push(sf.f(x)? - sf.f_by_quadrature(x)?);
    }
    let d = 1e-5;
    let mut fd_g = Vec::new();
    let mut fd_h = Vec::new();
    for i in 0..=49 {
        let x = 0.1 + 0.1 * i as f64;
        fd_g.push((sf.f(x + d)? - sf.f(x - d)?) / (2.0 * d) - sf.g(x)?);
        fd_h.push((sf.g(x + d)? - sf.g(x - d)?) / (2.0 * d) - sf.h(x)?);
    }
    Ok(vec![
        Check {
            name: "2h + xg - f",
            worst: max_abs(identity),
            tol: 1e-12,
        },
        Check {
            name: "g(0) + 1/2",
            worst: (sf.g(0.0)? + 0.5).abs(),
            tol: 1e-15,
        },
        Check {
            name: "f' - g (finite difference)",
            worst: max_abs(fd_g),
            tol: 1e-6,
        },
        Check {
            name: "g' - h (finite difference)",
            worst: max_abs(fd_h),
            tol: 1e-6,
        },
        Check {
            name: "f closed form vs quadrature",
            worst: max_abs(oracle),
            tol: 1e-10,
        },
    ])
}

fn green() -> Result<Vec<Check>, Failure> {
    let g = GreenEvaluator::default();
    let mut ode = Vec::new();
    for n in 0..=8i64 {
        for t in [0.25, 1.0, 4.0, 16.0] {
            let source = if n == 0 { 1.0 } else { 0.0 };
            ode.push(g.gamma_dot(n, t)? - g.laplacian(n, t)? - source);
        }
    }
    let mut oracle = Vec::new();
    let mut kernel = Vec::new();
    for n in [0i64, 1, 3, 7, 12] {
        for t in [0.3, 2.0, 9.0, 40.0] {
            oracle.push(g.gamma(n, t)? - green_by_time_integral(n, t)?);
            kernel.push(g.gamma_dot(n, t)? - heat_kernel(n, t)?);
        }
    }
    let mut symmetry = Vec::new();
    for n in 0..6i64 {
        for t in [0.5, 3.0, 20.0] {
            symmetry.push(g.gamma(n, t)? - g.gamma(-n, t)?);
            symmetry.push(g.grad_gamma(n, t)? + g.grad_gamma(-(n + 1), t)?);
        }
    }
    Ok(vec![
        Check {
            name: "Γ̇ - ΔΓ - δ",
            worst: max_abs(ode),
            tol: 1e-9,
        },
        Check {
            name: "Γ vs time-integrated Bessel kernel",
            worst: max_abs(oracle),
            tol: 1e-10,
        },
        Check {
            name: "Γ̇ vs Bessel kernel",
            worst: max_abs(kernel),
            tol: 1e-10,
        },
        Check {
            name: "symmetry",
            worst: max_abs(symmetry),
            tol: 0.0,
        },
    ])
}

fn integrals() -> Result<Vec<Check>, Failure> {
    let grid = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];
    let mut forms = Vec::new();
    let mut identity = Vec::new();
    for a in grid {
        let (p, q) = integral_i_f_forms(a)?;
        forms.push(p - q);
        let (p, q) = integral_i_g_forms(a)?;
        forms.push(p - q);
        identity.push(integral_identity_residual(a)?);
    }
    Ok(vec![
        Check {
            name: "I_F, I_G dual forms",
            worst: max_abs(forms),
            tol: 1e-9,
        },
        Check {
            name: "(2a+1)I_G - 2I_F + 2a",
            worst: max_abs(identity),
            tol: 1e-9,
        },
    ])
}

fn astar() -> Result<Vec<Check>, Failure> {
    let mut spread = Vec::new();
    let mut prev = f64::INFINITY;
    let mut increases = 0.0f64;
    for l in [3.0, 5.0, 10.0, 50.0] {
        let k = solve_a_star(l)?;
        spread.push(k.max_disagreement());
        increases = increases.max(k.a_star - prev);
        prev = k.a_star;
    }
    Ok(vec![
        Check {
            name: "three-balance root agreement",
            worst: max_abs(spread),
            tol: 1e-8,
        },
        Check {
            name: "a* decreasing (largest increase)",
            worst: increases.max(0.0),
            tol: 0.0,
        },
    ])
}

fn patterns() -> Result<Vec<Check>, Failure> {
    let mut mismatches = 0.0;
    for (a, b) in [(0.5, 0.25), (2.0 / 3.0, 0.2), (2f64.sqrt() / 5.0, 0.8)] {
        let set = gen_quasiperiodic(a, b, 10_000)?;
        for n in 1..=10_000u64 {
            let member = (n as f64 * a + b).floor() > ((n - 1) as f64 * a + b).floor();
            if member != set.contains(n as i64) {
                mismatches += 1.0;
            }
        }
    }
    Ok(vec![Check {
        name: "generator vs floor scan (mismatches)",
        worst: mismatches,
        tol: 0.0,
    }])
}

pub fn run(args: Args) -> Outcome {
    if let Some(s) = args.strict {
        if !(s >= 0.0) {
            return Err(Failure::Config(format!(
                "--strict must be nonnegative, got {s}"
            )));
        }
    }
    let groups: Vec<Group> = if args.group.is_empty() {
        ALL.to_vec()
    } else {
        args.group.clone()
    };
    let mut failed = Vec::new();
    for group in groups {
        let checks = match group {
            Group::Specfun => specfun()?,
            Group::Green => green()?,
            Group::Integrals => integrals()?,
            Group::Astar => astar()?,
            Group::Patterns => patterns()?,
        };
        let name = format!("{group:?}").to_lowercase();
        let mut ok = true;
        for c in &checks {
            let tol = args.strict.map_or(c.tol, |s| s.min(c.tol));
            let pass = c.worst <= tol;
            ok &= pass;
            println!(
                "{name:>9}  {:<40} worst {:<10.3e} tol {:<8.1e} {}",
                c.name,
                c.worst,
                tol,
                if pass { "PASS" } else { "FAIL" }
            );
        }
        println!("{name:>9}  {}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(format!(
            "self-test groups failed: {}",
            failed.join(", ")
        )))
    }
}

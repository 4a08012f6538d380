//! Command-line front end of fkt-core: argument parsing, dispatch and
//! record emission.

pub mod commands;
pub mod output;

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use output::Format;

#[derive(Debug, Parser)]
#[command(name = "fkt", version, about = "L² torsion computations in finite von Neumann algebra models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// JSON instance file; `-` or absent reads standard input.
    #[arg(long = "in", global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Evaluation point when no sweep is requested.
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u_max: Option<f64>,
    /// Number of sweep points (including both ends).
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Relative kernel threshold of the spectral calculus.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_kernel: f64,
    /// Absolute error budget of the quadratures.
    #[arg(long, global = true, alias = "tol", default_value_t = 1e-10)]
    pub tol_quad: f64,
    /// Upper end of the quadrature range.
    #[arg(long, global = true, default_value_t = 10.0)]
    pub rmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandolQuantity {
    Zeta,
    ZetaPrime,
    #[value(name = "C")]
    C,
    Torsion,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fuglede-Kadison determinant of an operator.
    Fkdet,
    /// Determinant-line element of a metric and its image under a map.
    Detline,
    /// Check `d² = 0` and report Betti numbers.
    ComplexValidate,
    /// Torsion of a complex along its metric family.
    Torsion,
    /// Finite-difference check of the metric variation formula.
    Vary {
        #[arg(long, default_value_t = 1e-4)]
        h: f64,
    },
    /// Relative torsion of two complexes.
    Relative,
    /// Holonomy of the determinant line bundle of a representation.
    Holonomy,
    /// Zeta constants of a hyperbolic surface.
    Randol {
        #[arg(long)]
        genus: u32,
        #[arg(long, value_enum)]
        what: RandolQuantity,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s: f64,
        /// Holomorphic degree of the torsion scalar.
        #[arg(long, default_value_t = 0)]
        p: u32,
    },
    /// Adiabatic index density and, with `C` and `x`, the heat kernel.
    Density,
}

/// Evaluation points: `--u` alone, or `steps` equally spaced points of
/// `[u_min, u_max]`.
pub fn sweep_points(g: &GlobalArgs) -> Result<Vec<f64>> {
    match (g.u_min, g.u_max, g.steps) {
        (None, None, None) => Ok(vec![g.u]),
        (lo, hi, steps) => {
            let steps = steps.unwrap_or(11);
            if steps == 0 {
                bail!(commands::Invalid("--steps must be at least 1".into()));
            }
            let lo = lo.unwrap_or(g.u);
            let hi = hi.unwrap_or(lo);
            if !lo.is_finite() || !hi.is_finite() || hi < lo {
                bail!(commands::Invalid(format!("bad sweep range [{lo}, {hi}]")));
            }
            let pts = (0..steps)
                .map(|k| if steps == 1 { lo } else { lo + (hi - lo) * k as f64 / (steps - 1) as f64 })
                .collect();
            Ok(pts)
        }
    }
}

fn check_tolerances(g: &GlobalArgs) -> Result<()> {
    for (name, v) in [("--tol-kernel", g.tol_kernel), ("--tol-quad", g.tol_quad), ("--rmax", g.rmax)] {
        if !(v > 0.0) || !v.is_finite() {
            bail!(commands::Invalid(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

fn read_input(g: &GlobalArgs, stdin: &mut dyn Read) -> Result<String> {
    let mut s = String::new();
    match &g.input {
        Some(p) if p.as_os_str() != "-" => {
            File::open(p).with_context(|| format!("opening {}", p.display()))?.read_to_string(&mut s)?;
        }
        _ => {
            stdin.read_to_string(&mut s)?;
        }
    }
    Ok(s)
}

/// Runs one command; `Ok(false)` means the input failed validation.
pub fn run(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<bool> {
    check_tolerances(&cli.global)?;
    let input = match cli.command {
        Command::Randol { .. } => String::new(),
        _ => read_input(&cli.global, stdin)?,
    };
    let (records, ok) = commands::dispatch(cli, &input)?;
    match &cli.global.out {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            output::emit(&records, cli.global.format, &mut f)?;
            f.flush()?;
        }
        None => {
            output::emit(&records, cli.global.format, stdout)?;
            stdout.flush()?;
        }
    }
    Ok(ok)
}

/// 3 for numerical non-convergence, 2 for every other failure.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<fkt_core::Error>() {
        Some(err) if err.is_convergence_failure() => 3,
        _ => 2,
    }
}

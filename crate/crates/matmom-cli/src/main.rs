//! `matmom`: truncated matrix moment problems from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use matmom::blockmat::{c64, C64};

/// Exit codes: 0 success, 1 input error, 2 mathematical precondition
/// failure, 3 quadrature nonconvergence, 4 verification failure.
#[derive(Parser, Debug)]
#[command(name = "matmom", version, about = "Truncated matrix trigonometric and Hamburger moment problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build E±, the second-kind polynomials and Θ; sample the maximum-entropy density.
    Solve(SolveArgs),
    /// Run the identity suite for the input's kind.
    Verify(VerifyArgs),
    /// Evaluate solutions T_Θ[S] for one or more Schur parameters.
    SampleSolutions(SampleArgs),
    /// Write a seeded positive definite moment file.
    RandomInstance(RandomArgs),
    /// Entropy inequality at one interior point.
    Entropy(EntropyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Moment JSON file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Point for α-based constructions, `re` or `re,im`. Defaults: 0.5 (disc), i (half-plane).
    #[arg(long, value_parser = parse_complex)]
    pub alpha: Option<C64>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Output directory for pair.json and density.csv.
    #[arg(long)]
    pub output: PathBuf,
    /// Number of boundary samples in density.csv.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Moment-recovery tolerance. Defaults: 1e-8 (trigonometric), 1e-6 (Hamburger).
    #[arg(long)]
    pub tol_moment: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Report file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Tolerance for algebraic identities; identities with inverses use ten times this.
    #[arg(long, default_value_t = matmom::identities::TOL_ALGEBRAIC)]
    pub tol_identity: f64,
    /// Random Hermitian perturbation of relative size EPS applied to G.
    #[arg(long, value_name = "EPS")]
    pub perturb: Option<f64>,
    /// Sample points per identity.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Output directory for solutions.json and density_<k>.csv.
    #[arg(long)]
    pub output: PathBuf,
    /// Schur parameter as inline JSON, e.g. '{"type":"constant","sigma_max":0.5}'. Repeatable.
    #[arg(long = "schur")]
    pub schur: Vec<String>,
    /// Interior point for the entropy gap. Defaults: 0.3 (disc), i (half-plane).
    #[arg(long, value_parser = parse_complex)]
    pub omega: Option<C64>,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    #[arg(long)]
    pub tol_moment: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RandomArgs {
    #[arg(long, value_parser = ["trigonometric", "trig", "hamburger"])]
    pub kind: String,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Moment file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub schur: Option<String>,
    #[arg(long, value_parser = parse_complex)]
    pub omega: Option<C64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(c64(num(re)?, 0.0)),
        [re, im] => Ok(c64(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

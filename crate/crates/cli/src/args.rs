use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fraclie_core::special::parse_rational;
use fraclie_core::AlphaParameter;
use num_rational::BigRational;

#[derive(Parser, Debug)]
#[command(name = "fraclie", version, about = "Symmetry tables, invariant solutions and residual checks for the time-fractional system D^α u = v_x, D^α v = b²(u) u_x")]
pub struct Cli {
    /// key=value file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Recorded in every report; no command draws random numbers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print commutator and adjoint tables and check them against the expected ones.
    Tables(CaseArgs),
    /// List the optimal system and verify the claimed equivalences.
    Optimal(CaseArgs),
    /// Residual, invariance-surface and sequential-equation checks for a solution family.
    Verify(VerifyArgs),
    /// Integrate the system numerically from a closed-form warm start.
    Evolve(EvolveArgs),
    /// Run the acceptance checks.
    Selftest(SelftestArgs),
}

pub fn alpha_arg(s: &str) -> Result<AlphaParameter, String> {
    let a = AlphaParameter::parse(s).map_err(|e| e.to_string())?;
    a.require_unit_interval().map_err(|e| e.to_string())?;
    Ok(a)
}

pub fn rational_arg(s: &str) -> Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct CaseArgs {
    /// 1, 2.1 or 2.2.
    #[arg(long)]
    pub case: String,
    /// Exact rational in (0, 1). Table checks without it run over a sample of values.
    #[arg(long, value_parser = alpha_arg)]
    pub alpha: Option<AlphaParameter>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub m: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub k: Option<BigRational>,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// 5.1, 19, 20, 21, 22, 5.4, 5.5 or lemma2.
    #[arg(long)]
    pub family: String,
    #[arg(long, value_parser = alpha_arg)]
    pub alpha: AlphaParameter,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub m: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub k: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub a: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub c: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub c1: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub c2: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub a1: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub a2: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub b1: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub b2: Option<BigRational>,
    /// Family 20: value of ψ where x = 0.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub psi0: Option<BigRational>,
    /// Family 20: tabulated ψ range.
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub psi_min: Option<BigRational>,
    #[arg(long, value_parser = rational_arg, allow_hyphen_values = true)]
    pub psi_max: Option<BigRational>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: Option<f64>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long, value_enum, default_value_t = PathArg::Auto)]
    pub path: PathArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Auto,
    Exact,
    Quadrature,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 1.5)]
    pub t1: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: Option<f64>,
    #[arg(long, default_value_t = 41)]
    pub nx: usize,
    /// Also write the trajectory CSV here (JSON output mode).
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Write the JSON summary here in CSV output mode (default: stderr).
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Criterion id or name substring.
    #[arg(long)]
    pub filter: Option<String>,
}

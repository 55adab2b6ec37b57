mod args;
mod catalog_cmd;
mod config;
mod evolve_cmd;
mod family;
mod verify_cmd;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fraclie_core::selftest::{run_selftest, CriterionResult};
use serde::Serialize;

use args::{Cli, Command, Format, SelftestArgs};

pub const SCHEMA: &str = "fraclie-report/1";
pub const THREADS_ENV: &str = "FRACLIE_THREADS";

const EXIT_FAIL: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fraclie_core::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if !e.is_input_error() => EXIT_FAIL,
            _ => EXIT_INPUT,
        }
    }
}

pub struct Ctx {
    pub seed: u64,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl Ctx {
    pub fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// Writes the main output to `--output` or stdout.
pub fn emit(ctx: &Ctx, text: &str) -> Result<(), CliError> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &ctx.output {
        Some(p) => std::fs::write(p, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct SelftestOutput<'a> {
    schema: &'a str,
    command: &'a str,
    seed: u64,
    passed: bool,
    results: Vec<CriterionResult>,
}

fn selftest(args: &SelftestArgs, ctx: &Ctx) -> Result<bool, CliError> {
    let results = run_selftest(args.filter.as_deref());
    if results.is_empty() {
        return Err(CliError::Input(format!("no criterion matches {:?}", args.filter.as_deref().unwrap_or(""))));
    }
    let passed = results.iter().all(|r| r.passed);
    if ctx.format(Format::Text) == Format::Json {
        let out = SelftestOutput { schema: SCHEMA, command: "selftest", seed: ctx.seed, passed, results };
        emit(ctx, &serde_json::to_string_pretty(&out)?)?;
    } else {
        let mut s = String::new();
        for r in &results {
            let _ = writeln!(s, "{}", r.line());
        }
        let failed = results.iter().filter(|r| !r.passed).count();
        let _ = writeln!(s, "{} of {} criteria passed", results.len() - failed, results.len());
        emit(ctx, &s)?;
    }
    Ok(passed)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))
}

fn run() -> Result<bool, CliError> {
    let argv = config::expand(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            std::process::exit(code.into());
        }
    };
    configure_threads()?;
    let ctx = Ctx { seed: cli.seed, format: cli.format, output: cli.output.clone() };
    match &cli.command {
        Command::Tables(a) => catalog_cmd::tables(a, &ctx),
        Command::Optimal(a) => catalog_cmd::optimal(a, &ctx),
        Command::Verify(a) => verify_cmd::verify(a, &ctx),
        Command::Evolve(a) => evolve_cmd::evolve_cmd(a, &ctx),
        Command::Selftest(a) => selftest(a, &ctx),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

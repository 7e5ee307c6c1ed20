//! `strongfield`: command-line front-end.
//!
//! Every command reads a scenario document, runs one computation and emits
//! CSV, JSON or text. Exit codes: 0 success, 1 I/O failure, 2 invalid input,
//! 3 outside the model's regime, 4 numerical failure.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use strongfield::scenario::Scenario;
use strongfield::{Error, ErrorClass};

use commands::Command;
use report::{write_all, Format};

#[derive(Debug, Parser)]
#[command(name = "strongfield", version, about = "Strong-field atom and adiabatic-dynamics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario JSON file
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory; results go to stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, global = true)]
    max_n: Option<u32>,
    #[arg(long, global = true)]
    truncation: Option<usize>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "STRONGFIELD_THREADS")]
    threads: Option<String>,
}

enum Failure {
    Io(String),
    Model(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Model(e) => match e.class() {
                ErrorClass::Validation => 2,
                ErrorClass::Regime => 3,
                ErrorClass::Numerical => 4,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(s) => f.write_str(s),
            Failure::Model(e) => write!(f, "{e}"),
        }
    }
}

fn threads(spec: Option<&str>) -> Result<(), Failure> {
    let Some(s) = spec else { return Ok(()) };
    let n: usize = s
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidInput(format!("thread count must be a positive integer, got {s:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Io(format!("cannot start thread pool: {e}")))
}

fn load(cli: &Cli) -> Result<Scenario, Failure> {
    let path = cli.scenario.as_ref().ok_or_else(|| Error::InvalidInput("--scenario <path> is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut s = Scenario::from_json_str(&text)?;
    let o = &mut s.options;
    o.max_n = cli.max_n.or(o.max_n);
    o.truncation = cli.truncation.or(o.truncation);
    o.tolerance = cli.tolerance.or(o.tolerance);
    o.grid = cli.grid.or(o.grid);
    s.validate()?;
    Ok(commands::resolve(cli.command, s)?)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    threads(cli.threads.as_deref())?;
    let scenario = load(cli)?;
    let report = commands::run(cli.command, &scenario)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let files = report.render(cli.format);
    match &cli.out {
        Some(dir) => {
            write_all(dir, &files).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        }
        None => {
            let many = files.len() > 1;
            for (name, contents) in &files {
                if many {
                    println!("# {name}");
                }
                print!("{contents}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

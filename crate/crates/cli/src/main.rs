//! `vqrd`: overheads, figure data and sampling runs from the command line.
//!
//! Data goes to stdout (or `--output`); failures print one JSON object on
//! stderr and exit with 2 (solver failure) or 3 (invalid input).

mod commands;
mod output;
mod presets;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vqrd::VqrdError;

use crate::output::{Cell, Table};

#[derive(Parser, Debug)]
#[command(name = "vqrd", version, about = "Virtual resource distillation: overheads, figure data, sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write data here instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Solver tolerance; overrides VQRD_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Append a text dump of every conic program solved to this file.
    #[arg(long, global = true, value_name = "PATH")]
    dump_program: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Virtual distillation overhead of one instance.
    Overhead(OverheadArgs),
    /// Figure data as CSV.
    Figure(FigureArgs),
    /// Monte Carlo estimate of a target expectation value.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theory {
    Coherence,
    Entanglement,
    Magic,
    Channel,
    Comb,
}

impl Theory {
    pub fn name(self) -> &'static str {
        match self {
            Theory::Coherence => "coherence",
            Theory::Entanglement => "entanglement",
            Theory::Magic => "magic",
            Theory::Channel => "channel",
            Theory::Comb => "comb",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Sdp,
    Closed,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OverheadArgs {
    #[arg(long, value_enum)]
    pub theory: Theory,
    /// Named input, e.g. `qubit:beta=0.25` or `isotropic:alpha=0.25,k=1`.
    #[arg(long, conflicts_with = "input")]
    pub preset: Option<String>,
    /// Operator file with the input state or Choi matrix.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Bipartition `AxB` of an entangled input file.
    #[arg(long)]
    pub dims: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Defaults to `sdp`, or `closed` for combs.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureKind {
    Fig2,
    Fig3,
    Comb,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(value_enum)]
    which: FigureKind,
    /// Diamond-distance tolerance of the memory figure.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Grid size (21 for fig2, 101 for fig3).
    #[arg(long)]
    points: Option<usize>,
    /// Comb step counts.
    #[arg(long = "steps", value_delimiter = ',', default_value = "1,2,3")]
    steps: Vec<usize>,
    /// Comb dephasing probabilities.
    #[arg(long = "p", value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    p: Vec<f64>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// `coherence:beta=0.25[,a=..,eps=..]`, `comb:l=1,p=0.1` or
    /// `inverse-<channel preset>`, e.g. `inverse-dephasing:p=0.2`.
    #[arg(long)]
    pub preset: String,
    #[arg(long)]
    pub n: Option<u64>,
    /// Accuracy for the Hoeffding sample count (with --delta).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

const EXIT_SOLVER: u8 = 2;
const EXIT_INPUT: u8 = 3;

fn error_kind(e: &VqrdError) -> (&'static str, u8) {
    match e {
        VqrdError::Solver { .. } => ("solver_failure", EXIT_SOLVER),
        VqrdError::Consistency(_) => ("consistency", EXIT_SOLVER),
        VqrdError::DimensionMismatch(_) => ("dimension_mismatch", EXIT_INPUT),
        VqrdError::InvalidInput(_) => ("invalid_input", EXIT_INPUT),
        VqrdError::OutOfRange(_) => ("out_of_range", EXIT_INPUT),
        VqrdError::Infeasible(_) => ("infeasible", EXIT_INPUT),
        VqrdError::NotInvertible(_) => ("not_invertible", EXIT_INPUT),
        VqrdError::Unsupported(_) => ("unsupported", EXIT_INPUT),
        VqrdError::Json(_) => ("bad_file", EXIT_INPUT),
        VqrdError::Io(_) => ("io", EXIT_INPUT),
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let obj = serde_json::json!({ "error": kind, "message": message, "exit_code": code });
    eprintln!("{obj}");
    ExitCode::from(code)
}

fn run(cli: &Cli) -> vqrd::Result<String> {
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(VqrdError::OutOfRange(format!("--tol {t} must be positive")));
        }
        // Set before any worker thread starts.
        std::env::set_var("VQRD_TOL", t.to_string());
    }
    if let Some(path) = &cli.dump_program {
        std::fs::write(path, "")?;
        vqrd::conic::set_dump_sink(Some(path.clone()));
    }
    let table = match &cli.command {
        Command::Overhead(a) => commands::overhead(a)?,
        Command::Figure(a) => commands::figure(a.which, a.eps, a.points, &a.steps, &a.p)?,
        Command::Sample(a) => {
            let r = commands::sample(a)?;
            let mut t = Table::new(vec!["estimate", "n", "std", "seed", "consumed"]);
            t.push(vec![Cell::Num(r.estimate), Cell::Int(r.n_samples), Cell::Num(r.empirical_std), Cell::Int(r.seed), Cell::Int(r.samples_consumed)]);
            if cli.format == Format::Json {
                return Ok(t.to_json_record());
            }
            t
        }
    };
    Ok(match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim(), EXIT_INPUT),
    };
    let text = match run(&cli) {
        Ok(t) => t,
        Err(e) => {
            let (kind, code) = error_kind(&e);
            return fail(kind, &e.to_string(), code);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail("io", &e.to_string(), EXIT_INPUT),
    }
}

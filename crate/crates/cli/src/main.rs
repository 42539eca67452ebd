mod commands;
mod construct;

use std::io;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use wagerlab::adversary::{AdversaryError, Theorem};
use wagerlab::criteria::Criterion;
use wagerlab::transforms::TransformKind;
use wagerlab::{EvalError, Rational};

#[derive(Parser, Debug)]
#[command(
    name = "wagerlab",
    version,
    about = "Exact martingale experiments over binary sequences"
)]
struct Cli {
    /// Report every file written on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a sequence that defeats a family of strategies.
    Construct(ConstructArgs),
    /// Evaluate one strategy along a sequence file.
    Evaluate(EvaluateArgs),
    /// Wrap a strategy in one of the transforms.
    Transform(TransformArgs),
    /// Check a trace against a success criterion.
    Verify(VerifyArgs),
    /// Print the strategy file schema and the builtin catalog.
    ListStrategies,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, value_parser = theorem_parser())]
    pub theorem: Theorem,
    /// Strategy file listing the family, in priority order.
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long)]
    pub horizon: usize,
    /// Coin seed (real-vs-v).
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Half-open seed range `a..b`, one output directory per seed under --trace-dir (real-vs-v).
    #[arg(long, value_parser = parse_seeds, conflicts_with_all = ["out", "log"], requires = "trace_dir")]
    pub seeds: Option<Range<u64>>,
    /// Target level of the harmonic phases (real-vs-v).
    #[arg(long = "L", value_name = "P/Q", value_parser = parse_rational)]
    pub level: Option<Rational>,
    /// Hero initial capital (real-vs-v, casino).
    #[arg(long, value_name = "P/Q", value_parser = parse_rational)]
    pub c0: Option<Rational>,
    /// Quiet steps before a casino player counts as settled.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Sequence file.
    #[arg(long, required_unless_present = "seeds")]
    pub out: Option<PathBuf>,
    /// Directory for the per-strategy traces (defaults to the directory of --out).
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
    /// Diagnostic log CSV.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub strategy: PathBuf,
    /// Entry of the strategy file to use, counting from 0.
    #[arg(long)]
    pub index: Option<usize>,
    #[arg(long)]
    pub sequence: PathBuf,
    /// Number of bits to evaluate (defaults to the whole sequence).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Trace CSV (defaults to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long, value_parser = transform_parser())]
    pub which: TransformKind,
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub index: Option<usize>,
    /// Comma separated `key=value` pairs: `a`, `b` for osc2cons; `level`, `t0` for v2unit.
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<String>,
    /// Sequence on which to estimate the v2unit level when none is given.
    #[arg(long)]
    pub sequence: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long, value_parser = criterion_parser())]
    pub criterion: Criterion,
    /// `G` for gains and consumption.
    #[arg(long, value_name = "P/Q", value_parser = parse_rational)]
    pub threshold: Option<Rational>,
    /// Oscillation band `a b` (defaults to the middle of the observed range).
    #[arg(long, num_args = 2, value_names = ["A", "B"], value_parser = parse_rational)]
    pub band: Option<Vec<Rational>>,
    /// Oscillation crossings required.
    #[arg(long, default_value_t = 2)]
    pub crossings: usize,
    /// Also report whether the failure statistic is constant over the last W steps.
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{field}: {reason}")]
    Config { field: &'static str, reason: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Adversary(AdversaryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl CliError {
    pub fn config(field: &'static str, reason: impl ToString) -> Self {
        CliError::Config {
            field,
            reason: reason.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

pub fn read(path: &Path, field: &'static str) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::config(field, format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_seeds(s: &str) -> Result<Range<u64>, String> {
    let (a, b) = s.split_once("..").ok_or("expected `a..b`")?;
    let a: u64 = a.parse().map_err(|e| format!("start: {e}"))?;
    let b: u64 = b.parse().map_err(|e| format!("end: {e}"))?;
    if a >= b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..b)
}

fn theorem_parser() -> impl TypedValueParser<Value = Theorem> {
    PossibleValuesParser::new(Theorem::ALL.map(Theorem::name))
        .map(|s| Theorem::parse(&s).expect("listed value"))
}

fn criterion_parser() -> impl TypedValueParser<Value = Criterion> {
    PossibleValuesParser::new(["gains", "consumption", "oscillation"])
        .map(|s| Criterion::parse(&s).expect("listed value"))
}

fn transform_parser() -> impl TypedValueParser<Value = TransformKind> {
    PossibleValuesParser::new(["osc2cons", "v2unit", "gain2osc", "gain2cons"])
        .map(|s| TransformKind::parse(&s).expect("listed value"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(args) => construct::run(&args, cli.verbose).map(|()| ExitCode::SUCCESS),
        Command::Evaluate(args) => commands::evaluate(&args).map(|()| ExitCode::SUCCESS),
        Command::Transform(args) => commands::transform(&args).map(|()| ExitCode::SUCCESS),
        Command::Verify(args) => commands::verify(&args),
        Command::ListStrategies => {
            commands::list_strategies();
            Ok(ExitCode::SUCCESS)
        }
    };
    result.unwrap_or_else(|e| {
        eprintln!("wagerlab: {e}");
        ExitCode::from(e.exit_code())
    })
}

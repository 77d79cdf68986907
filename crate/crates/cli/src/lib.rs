//! Command-line frontend for the `wildstokes` library.
//!
//! Every subcommand writes a schema-versioned JSON report (or CSV for
//! `sweep`) to `--out`, `-` meaning standard output. Exit codes: 0 success,
//! 2 contract violation, 3 numeric failure, 64 usage error.

mod commands;
pub mod config;
pub mod parse;
pub mod report;
pub mod rhs;
pub mod sweep;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::fmt;

pub use config::Config;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONTRACT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Lib(wildstokes::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<wildstokes::Error> for CliError {
    fn from(e: wildstokes::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_CONTRACT,
            CliError::Lib(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Lib(_) => EXIT_CONTRACT,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "wildstokes",
    version,
    about = "Difference systems at an irregular singular point at infinity"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Truncation order for generated series (default 32, or WILDSTOKES_TRUNC_ORDER)
    #[arg(long, global = true)]
    pub trunc_order: Option<i64>,
    /// Numeric tolerance in (0, 1e-2]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for sampled checks
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sheet offset for log s (arg s + 2π·offset)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub branch_offset: Option<i64>,
    /// Output path, `-` for standard output
    #[arg(long, global = true)]
    pub out: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Puiseux series arithmetic
    Series(SeriesArgs),
    /// Exponent dominance and Stokes directions
    #[command(subcommand)]
    Exponent(ExponentCmd),
    /// Classify an unramified rank-one module
    #[command(name = "classify-rank1")]
    ClassifyRank1 {
        #[arg(long)]
        series: String,
    },
    /// Module constructions
    Module {
        op: ModuleOp,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
    },
    /// Formal conjugation of a module to a graded model
    Conjugate {
        #[arg(long)]
        module: String,
        #[arg(long)]
        graded: String,
        #[arg(long)]
        order: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        lead: i64,
    },
    /// Split a Laurent series in u at the threshold of an exponent pair
    Split {
        #[arg(long)]
        laurent: String,
        #[arg(long)]
        ai: String,
        #[arg(long)]
        aj: String,
        #[arg(long, value_enum)]
        parity: ParityArg,
    },
    /// Factor a Stokes cocycle
    #[command(name = "factor-cocycle")]
    FactorCocycle {
        #[arg(long)]
        cocycle: String,
        #[arg(long, value_enum)]
        parity: ParityArg,
    },
    /// Solve ψ̃Λ − Λ = f numerically
    Lambda(LambdaArgs),
    /// Gamma-function benchmark
    #[command(name = "gamma-check")]
    GammaCheck(GammaArgs),
    /// Dominance table over a grid of directions (CSV)
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    pub op: SeriesOp,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: Option<String>,
    /// Evaluation point for `eval`
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Exponent for `pow`
    #[arg(long, allow_hyphen_values = true)]
    pub power: Option<String>,
    /// Branch of the logarithm for `log`
    #[arg(long, allow_hyphen_values = true)]
    pub log_branch: Option<i64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
    Inv,
    Exp,
    Log,
    Pow,
    Shift,
    Unshift,
    Eval,
}

#[derive(Subcommand, Debug)]
pub enum ExponentCmd {
    /// Dominance verdict of a against b at a direction
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Stokes directions of the pair
    Stokes {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Ordering permutation of a list of exponents
    Order {
        #[arg(long)]
        list: String,
        #[arg(long, value_enum)]
        parity: ParityArg,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleOp {
    Tensor,
    Hom,
    Sum,
    Dual,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for wildstokes::exponents::Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Even => Self::Even,
            ParityArg::Odd => Self::Odd,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMode {
    Series,
    Integral,
}

#[derive(Args, Debug)]
pub struct LambdaArgs {
    #[arg(long, value_enum)]
    pub mode: LambdaMode,
    #[arg(long)]
    pub module: String,
    /// Built-in family (`zero`, `one`, `fundamental-decay`) or a JSON file
    #[arg(long)]
    pub rhs: String,
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    /// Path anchor for integral mode (default at + 1/2 − i)
    #[arg(long, allow_hyphen_values = true)]
    pub anchor: Option<String>,
    /// u^n pre-twist for integral mode (default from the decay probe)
    #[arg(long)]
    pub twist: Option<i64>,
    #[arg(long, default_value_t = 10_000)]
    pub max_terms: usize,
}

#[derive(Args, Debug)]
pub struct GammaArgs {
    /// Run every check (the default when no check is selected)
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub stirling: bool,
    #[arg(long)]
    pub reflection: bool,
    #[arg(long)]
    pub graded: bool,
    #[arg(long)]
    pub cocycle: bool,
    /// Stirling fit orders a_0..a_K
    #[arg(long, default_value_t = 4)]
    pub orders: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub ray_angle: f64,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long, default_value_t = 360)]
    pub points: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU, allow_hyphen_values = true)]
    pub to: f64,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let echo: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(&cli, echo) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `wildstokes --help` for usage");
            }
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, echo: Vec<String>) -> CliResult<()> {
    let env = std::env::var("WILDSTOKES_TRUNC_ORDER").ok();
    let cfg = Config::resolve(&cli.common, env.as_deref())?;
    commands::dispatch(&cli.command, &cfg, echo)
}

//! Command-line driver: `analyze`, `words`, `bounds` and `oracle`.
//!
//! Every command returns its output text and an exit code so the binary is a
//! thin shell around [`run`].

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use entropic_core::words::{
    big_gamma_recursive, brute_primitive, gamma_mobius, primitive_count, validate_annexe,
    BoundChainReport, PrimitiveCount, WordConstraint,
};
use entropic_core::{configured_cap, InputInstance, ModelId};

pub mod config;
pub mod report;

pub use config::{AnalyzeArgs, ProfileKind, RunConfig};
pub use report::{analyze, cmd_analyze, ClassRow, DomainSummary, Report};

/// Exit code when a check or bound link fails.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] entropic_core::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(entropic_core::Error::InvalidArgument(_)) => EXIT_CONFIG,
            CliError::Core(_) => EXIT_ANALYSIS,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "entropic",
    version,
    about = "Entropic weight of algorithm events"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate a domain, index the trace literals and weigh every class.
    Analyze(AnalyzeArgs),
    /// Counts of primitive words.
    Words(WordsArgs),
    /// Check the bound chains for the maxPS sets G and H.
    Bounds(BoundsArgs),
    /// Evaluate a model's function on one input.
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct WordsArgs {
    /// γ(s): primitive words of length s.
    #[arg(long, value_name = "S", conflicts_with_all = ["big_gamma", "table"])]
    pub gamma: Option<u32>,
    /// Γ(s): primitive words of length s with w(1) = w(3).
    #[arg(long, value_name = "S", conflicts_with = "table")]
    pub big_gamma: Option<u32>,
    /// JSON table of γ and Γ for lengths 1..=S.
    #[arg(long, value_name = "S")]
    pub table: Option<u32>,
    #[arg(long, default_value_t = 2)]
    pub alphabet: u32,
    /// Also count by enumeration and fail on disagreement.
    #[arg(long)]
    pub brute: bool,
}

#[derive(Args, Debug, Clone)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub alphabet: u32,
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    #[arg(long)]
    pub model: String,
    /// A word such as `aab` or `0110`.
    #[arg(long)]
    pub input: String,
    /// Defaults to the smallest alphabet (at least 2) containing the input.
    #[arg(long)]
    pub alphabet: Option<u32>,
}

/// Text to print and exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { stdout, code: 0 }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze(a) => run_analyze(&a.resolve()?),
        Command::Words(w) => cmd_words(&w),
        Command::Bounds(b) => cmd_bounds(&b),
        Command::Oracle(o) => cmd_oracle(&o).map(|v| Outcome::ok(format!("{v}\n"))),
    }
}

fn write_out(path: &Option<PathBuf>, text: String) -> Result<String, CliError> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub fn run_analyze(config: &RunConfig) -> Result<Outcome, CliError> {
    let report = cmd_analyze(config)?;
    if let Some(dir) = &config.csv {
        report.write_csv(dir)?;
    }
    let code = if report.all_checks_hold() {
        0
    } else {
        EXIT_CHECK_FAILED
    };
    Ok(Outcome {
        stdout: write_out(&config.out, report.to_json())?,
        code,
    })
}

pub fn cmd_words(args: &WordsArgs) -> Result<Outcome, CliError> {
    let a = args.alphabet;
    let cap = configured_cap();
    if let Some(s) = args.gamma {
        let g = gamma_mobius(s, a)?;
        let mut code = 0;
        if args.brute && brute_primitive(s, a, WordConstraint::None, cap)? as i128 != g {
            code = EXIT_CHECK_FAILED;
        }
        return Ok(Outcome {
            stdout: format!("{g}\n"),
            code,
        });
    }
    if let Some(s) = args.big_gamma {
        let g = big_gamma_recursive(s, a)?;
        let mut code = 0;
        if args.brute
            && s >= 3
            && brute_primitive(s, a, WordConstraint::FirstEqualsThird, cap)? as i128 != g
        {
            code = EXIT_CHECK_FAILED;
        }
        return Ok(Outcome {
            stdout: format!("{g}\n"),
            code,
        });
    }
    if let Some(top) = args.table {
        let rows: Vec<PrimitiveCount> = (1..=top)
            .map(|s| primitive_count(s, a))
            .collect::<Result<_, _>>()?;
        let mut text = serde_json::to_string_pretty(&rows).expect("table serializes");
        text.push('\n');
        return Ok(Outcome::ok(text));
    }
    Err(CliError::Config(
        "words needs --gamma, --big-gamma or --table".into(),
    ))
}

pub fn bounds_report(args: &BoundsArgs) -> Result<BoundChainReport, CliError> {
    let cap = args.cap.unwrap_or_else(configured_cap);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| validate_annexe(args.n, args.alphabet, cap))?)
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<Outcome, CliError> {
    let r = bounds_report(args)?;
    let mut text = serde_json::to_string_pretty(&r).expect("report serializes");
    text.push('\n');
    let code = if r.all_links_hold() {
        0
    } else {
        EXIT_CHECK_FAILED
    };
    Ok(Outcome {
        stdout: write_out(&args.out, text)?,
        code,
    })
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<i64, CliError> {
    let model = ModelId::parse(&args.model)
        .ok_or_else(|| CliError::Config(format!("unknown model `{}`", args.model)))?;
    let alphabet = match args.alphabet {
        Some(a) => a,
        None => {
            let top = InputInstance::parse(&args.input, 36)
                .ok_or_else(|| CliError::Config(format!("input {} is not a word", args.input)))?
                .word
                .iter()
                .copied()
                .max()
                .unwrap_or(0);
            (top as u32 + 1).max(2)
        }
    };
    let x = InputInstance::parse(&args.input, alphabet).ok_or_else(|| {
        CliError::Config(format!(
            "input {} is not a word over {alphabet} symbols",
            args.input
        ))
    })?;
    if model == ModelId::Xor && alphabet != 2 {
        return Err(CliError::Config("xor takes bit words".into()));
    }
    Ok(model.oracle(&x.word))
}

//! `depdist` — reproducible dependency-structure experiments.
//!
//! Subcommands: `generate` (structure files), `classify` (annotate with
//! class flags), `survey` (artificial per-length statistics), `treebank`
//! (attested per-length statistics from CoNLL-U).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Progress and
//! warnings go to standard error only; data streams stay clean.

mod commands;
mod format;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "depdist",
    version,
    about = "Generate, classify and survey rooted dependency structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exhaustive,
    Sample,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write structures of one length, one per line (`n<TAB>h1 h2 … hn`,
    /// 0 marks the root)
    Generate(GenerateArgs),
    /// Append class membership flags (planar,projective,wg1,1ec as 0/1)
    /// to structure lines
    Classify(ClassifyArgs),
    /// Run the per-length artificial-ensemble experiment and emit
    /// plot-ready rows
    Survey(SurveyArgs),
    /// Survey attested sentences from CoNLL-U treebanks (gzip accepted)
    Treebank(TreebankArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Sentence length
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    /// exhaustive: every structure once; sample: uniform draws
    #[arg(long, value_enum)]
    mode: Mode,
    /// Draws in sample mode
    #[arg(long, default_value_t = 1000)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow exhaustive enumeration past the practical bound (n > 10)
    #[arg(long)]
    force: bool,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Structure file to annotate (standard input when omitted)
    input: Option<PathBuf>,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurveyArgs {
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    /// Largest exhaustively surveyed length (paper scale used 10)
    #[arg(long, default_value_t = 8)]
    n_star: usize,
    /// Draws per sampled length (paper scale used 10^9)
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated class list
    #[arg(long, default_value = "all,planar,projective,wg1,1ec")]
    classes: String,
    /// Worker threads: 0 = one per core, 1 = sequential
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Keep undersampled rows (reported=false) instead of dropping them
    #[arg(long)]
    keep_undersampled: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest path (defaults to <out>.manifest.json when --out is set)
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct TreebankArgs {
    /// CoNLL-U files, optionally gzip-compressed
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Comma-separated UPOS tags to strip as punctuation
    #[arg(long, default_value = "PUNCT")]
    punct_tags: String,
    /// Keep undersampled rows (reported=false) instead of dropping them
    #[arg(long)]
    keep_undersampled: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest path (defaults to <out>.manifest.json when --out is set)
    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            e.print().ok();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let result = match cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Classify(args) => commands::classify(args),
        Command::Survey(args) => commands::survey(args),
        Command::Treebank(args) => commands::treebank(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("depdist: usage error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Data(msg)) => {
            eprintln!("depdist: data error: {msg}");
            ExitCode::from(2)
        }
    }
}

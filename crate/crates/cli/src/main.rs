mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use absagen::ImplicitPairing;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

/// Prepare training data for, and score, ABSA text-generation runs.
#[derive(Debug, Parser)]
#[command(name = "absagen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write JSONL training pairs ({"id","input","target"}) for one or more splits.
    Prepare(RunArgs),
    /// Decode a predictions JSONL file ({"id","output"}) and score it.
    Score(RunArgs),
    /// Load gold files, print diagnostics and check the serialize/decode round trip.
    Validate(RunArgs),
    /// Show the target text and decoded tuples of one sentence.
    Inspect {
        /// Sentence id to show.
        #[arg(long)]
        id: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// restaurants-14, restaurants-15, restaurants-16 or sentihood.
    #[arg(long)]
    dataset: Option<String>,
    /// AD, TD, ASD, TSD, TAD or TASD; `prepare` accepts a comma-separated list.
    #[arg(long)]
    task: Option<String>,
    /// phrase or sentence.
    #[arg(long)]
    format: Option<String>,
    /// joint or separate.
    #[arg(long)]
    mode: Option<String>,
    /// Input prefix for training pairs (default: `<task>: `).
    #[arg(long)]
    prefix: Option<String>,
    /// strict, lenient, or lenient:N for an edit budget of N.
    #[arg(long)]
    policy: Option<String>,
    /// Gold split file; repeat for several splits.
    #[arg(long)]
    gold: Vec<PathBuf>,
    /// Predictions JSONL file.
    #[arg(long)]
    pred: Option<PathBuf>,
    /// Output file or directory for `prepare`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where `score` writes the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Headline TSD/TASD score counts implicit-target tuples.
    #[arg(long)]
    implicit_in_overall: bool,
    /// Average Sentihood macro-F1 over all eight categories.
    #[arg(long)]
    keep_absent_categories: bool,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            dataset: self.dataset,
            task: self.task,
            format: self.format,
            mode: self.mode,
            prefix: self.prefix,
            policy: self.policy,
            gold: self.gold,
            pred: self.pred,
            out: self.out,
            report: self.report,
            implicit_pairing: self
                .implicit_in_overall
                .then_some(ImplicitPairing::OverallIncludesImplicit),
            skip_absent_categories: self.keep_absent_categories.then_some(false),
        };
        Ok(file.overlay(flags))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Prepare(args) => commands::prepare(&args.resolve()?),
        Command::Score(args) => {
            let report = commands::score(&args.resolve()?)?;
            print!("{}", commands::summary_table(&report));
            Ok(())
        }
        Command::Validate(args) => match commands::validate(&args.resolve()?)? {
            0 => Ok(()),
            n => Err(CliError::data(format!("{n} round-trip failures"))),
        },
        Command::Inspect { id, run } => {
            print!("{}", commands::inspect(&run.resolve()?, &id)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

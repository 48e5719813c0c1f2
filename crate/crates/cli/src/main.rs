//! Command-line front end: ingest, stance detection, analysis, synthetic
//! corpora and report rendering.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "stancenet", version, about = "Stance communities in tweet corpora and how they differ")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse tweets, keep on-topic ones and drop repeated texts.
    Ingest(Overrides),
    /// Propagate seed valences over the hashtag graph and label users.
    Stance(Overrides),
    /// Compare the two communities' language and interaction networks.
    Analyze(Overrides),
    /// Generate a synthetic corpus with known communities.
    Synth(SynthArgs),
    /// Print the report tables of a finished analysis.
    Report(Overrides),
}

/// Settings shared by the pipeline commands. Flags override the config file.
#[derive(Args, Debug, Default)]
pub struct Overrides {
    /// TOML pipeline config.
    #[arg(long, env = "STANCENET_CONFIG")]
    pub config: Option<PathBuf>,
    /// Tweet files in JSON Lines format.
    #[arg(long, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Seed hashtags, one `hashtag,valence` per line.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Lexicon config replacing the built-in categories.
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    /// Sweeps per slack increment.
    #[arg(long)]
    pub gamma: Option<u64>,
    /// Significance level.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Build interaction networks from the deduplicated corpus.
    #[arg(long)]
    pub dedup_for_networks: bool,
    /// Unlabeled neighbors count with valence 0 during propagation.
    #[arg(long)]
    pub literal_dilution: bool,
    /// Lexical statistics over the corpus before removing repeated texts.
    #[arg(long)]
    pub raw_denominators: bool,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Generator parameters, JSON or TOML by extension.
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, default_value = "synth")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("STANCENET_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(o) => commands::ingest(&o),
        Command::Stance(o) => commands::stance(&o),
        Command::Analyze(o) => commands::analyze(&o),
        Command::Synth(a) => commands::synth(&a),
        Command::Report(o) => commands::report(&o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

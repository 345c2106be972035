//! `bapkit`: generate synthetic game logs, split them by target, render
//! prompts, score predictions and summarize datasets.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bapkit_core::dataset::PromptVariant;
use bapkit_core::simulator::SimulatorKind;

/// Marks errors caused by bad flags or configuration (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "bapkit", version, about = "Builder action prediction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate games and write them as JSON lines.
    Generate(GenerateArgs),
    /// Split game logs into train/val/test with disjoint targets.
    Split(SplitArgs),
    /// Extract items from game logs and render their prompts.
    Render(RenderArgs),
    /// Score predictions against reference items.
    Score(ScoreArgs),
    /// Summarize game logs.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    Random,
    Blocks,
    Shapes,
}

impl Kind {
    pub fn simulator(self) -> SimulatorKind {
        match self {
            Kind::Random => SimulatorKind::Random,
            Kind::Blocks => SimulatorKind::BlocksForShapes,
            Kind::Shapes => SimulatorKind::ShapesForShapes,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Kind::Random => "random",
            Kind::Blocks => "blocks",
            Kind::Shapes => "shapes",
        }
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Number of games.
    #[arg(long, default_value_t = 100, conflicts_with = "target_items")]
    pub count: usize,
    /// Generate games until at least this many items exist.
    #[arg(long)]
    pub target_items: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// TOML file with simulator settings; omitted keys keep their defaults.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Output JSONL file.
    #[arg(long)]
    pub out: std::path::PathBuf,
    /// Worker threads (0 = all cores). Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Also split the logs into this directory.
    #[arg(long)]
    pub split_dir: Option<std::path::PathBuf>,
    #[command(flatten)]
    pub split: SplitOptions,
}

#[derive(Args, Debug, Clone)]
pub struct SplitOptions {
    /// Train, val and test proportions, in items.
    #[arg(long, value_delimiter = ',', default_values_t = [0.8, 0.1, 0.1])]
    pub split_ratios: Vec<f64>,
    /// Seed for the split shuffle.
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// Game logs (JSONL).
    #[arg(long)]
    pub logs: std::path::PathBuf,
    #[arg(long)]
    pub out_dir: std::path::PathBuf,
    #[command(flatten)]
    pub split: SplitOptions,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Game logs (JSONL).
    #[arg(long)]
    pub logs: std::path::PathBuf,
    #[arg(long, default_value = "N+PosB+S")]
    pub variant: PromptVariant,
    /// Prompts as JSONL `{id, variant, prompt, target}`.
    #[arg(long)]
    pub out: std::path::PathBuf,
    /// Reference items for `score`.
    #[arg(long)]
    pub items: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    /// Reference items (JSONL, as written by `render --items`).
    #[arg(long)]
    pub references: std::path::PathBuf,
    /// Predictions (JSONL `{id, output}`).
    #[arg(long)]
    pub predictions: std::path::PathBuf,
    /// Report file: score table followed by one line per item.
    #[arg(long)]
    pub report: Option<std::path::PathBuf>,
    /// Score despite unmatched ids and malformed lines.
    #[arg(long)]
    pub lenient: bool,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// A JSONL file or a directory of them.
    #[arg(long)]
    pub logs: std::path::PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Split(a) => commands::split(&a),
        Command::Render(a) => commands::render(&a),
        Command::Score(a) => commands::score(&a),
        Command::Stats(a) => commands::stats(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

//! `autorobo`: command-line front end of the task-to-policy pipeline.
//!
//! Exit codes: 0 success, 1 run failure, 2 usage error.

mod commands;
mod config;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "autorobo", version, about = "Task-to-policy pipeline for planar serial-arm robots")]
pub struct Cli {
    /// Configuration file (TOML); defaults to ./autorobo.toml when present.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the configured one.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Live,
    Record,
    Replay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyArg {
    /// Every built-in scenario with every model.
    Generalization,
    /// Length and disable conditions on the example scenario.
    Ablation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Ppo,
    Cem,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in scenarios.
    Scenarios,
    /// Run the three-agent pipeline on a scenario.
    Run {
        /// Scenario id (1-10), `example`, or a scenario JSON file.
        scenario: String,
        /// Model id sent to the endpoint; defaults to the first configured model.
        #[arg(long)]
        model: Option<String>,
        /// Where LLM replies come from: the endpoint, the endpoint with recording, or recorded fixtures.
        #[arg(long, value_enum, default_value = "live")]
        mode: Mode,
        /// Description length: short, normal or long.
        #[arg(long, default_value = "normal")]
        length: String,
        /// Agents to disable, comma separated (task_analyst, robot_designer, rl_designer).
        #[arg(long, value_delimiter = ',')]
        disable: Vec<String>,
        /// Override the episode count of the generated RL spec.
        #[arg(long)]
        episodes: Option<usize>,
        /// Stop after code extraction; do not train.
        #[arg(long)]
        no_execute: bool,
    },
    /// Compute the minimum-cost arm design without any LLM.
    Design {
        /// Scenario id (1-10), `example`, or a scenario JSON file.
        scenario: String,
        /// Multiplicative reachability margin.
        #[arg(long)]
        margin: Option<f64>,
    },
    /// Train policies on the optimal design without any LLM.
    Train {
        /// Scenario id (1-10), `example`, or a scenario JSON file.
        scenario: String,
        /// Random seed; defaults to the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Training episodes (generations for CEM); defaults to the configured count.
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long, value_enum, default_value = "ppo")]
        algorithm: AlgorithmArg,
        /// Multiplicative reachability margin of the design trained on.
        #[arg(long)]
        margin: Option<f64>,
    },
    /// Run a whole study and write its score matrix.
    Bench {
        /// Which study to run.
        #[arg(value_enum)]
        study: StudyArg,
        /// Models to evaluate, comma separated; defaults to the configured list.
        #[arg(long, value_delimiter = ',')]
        models: Vec<String>,
        /// Where LLM replies come from: the endpoint, the endpoint with recording, or recorded fixtures.
        #[arg(long, value_enum, default_value = "live")]
        mode: Mode,
        /// Override the episode count of every generated RL spec.
        #[arg(long)]
        episodes: Option<usize>,
        /// JSON file of manual rubric scores to apply.
        #[arg(long)]
        overrides: Option<PathBuf>,
    },
    /// Print the merged report and scores of a finished run.
    Report { run_id: String },
    /// Regenerate the figures of a finished run.
    Plot { run_id: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .parse_default_env()
        .init();
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `autorobo --help` for usage.");
            ExitCode::from(2)
        }
        Err(commands::CliError::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

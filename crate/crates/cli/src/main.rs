use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use frame_forge_cli::{commands, report, threads_from_env, CliError, ExperimentConfig, Outcome, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Gen,
    Fit,
    Schur,
    Jaffard,
    Dual,
    Expand,
    Fframe,
    Report,
}

/// Builds frame systems from JSON configs and runs the verification pipelines.
#[derive(Debug, Parser)]
#[command(name = "frame-forge", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Omit the generation time so reports are byte-identical across runs.
    #[arg(long)]
    no_timestamp: bool,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::invalid(e.to_string()))?;
    }
    let cfg = ExperimentConfig::load(&cli.config)?;
    let opts = RunOptions { out: cli.out.clone(), seed: cli.seed, timestamp: !cli.no_timestamp };
    match cli.command {
        Command::Gen => commands::gen(&cfg, &opts),
        Command::Fit => commands::fit(&cfg, &opts),
        Command::Schur => commands::schur(&cfg, &opts),
        Command::Jaffard => commands::jaffard(&cfg, &opts),
        Command::Dual => commands::dual(&cfg, &opts),
        Command::Expand => commands::expand(&cfg, &opts),
        Command::Fframe => commands::fframe(&cfg, &opts),
        Command::Report => report::report(&cfg, &opts),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", frame_forge_cli::to_json(&outcome.summary).trim_end());
            ExitCode::from(outcome.exit_code())
        }
        Err(err) => {
            eprintln!("frame-forge: {err}");
            ExitCode::from(err.code)
        }
    }
}

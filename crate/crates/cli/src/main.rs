//! `smokeshift <command> --config <file.json> [--seed N] [--threads N]
//! [--out DIR]`. The config file carries one block per command; flags
//! override the file's global settings. `SMOKESHIFT_LOG` overrides the
//! configured log level. Exit code 0 iff the command succeeded; warnings
//! are logged and recorded in the manifest but never change the exit
//! code.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use smokeshift_cli::{dispatch, CommandKind, RunConfig};

#[derive(Parser)]
#[command(name = "smokeshift", version, about = "Smoke-control analysis pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config file's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the config file's thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Overrides the config file's output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic rollout: panel, boundaries, weather, cohort.
    Simulate,
    /// Classify stations against SCA, borough, and downwind regions.
    Assign,
    /// Evaluate the dispersion field and contour for one SCA.
    Plume,
    /// Relative-time event-study regression.
    EventStudy {
        /// Bin width for the relative-time dummies, in months.
        #[arg(long)]
        bin_width: Option<u32>,
    },
    /// Static difference-in-differences regression.
    Did,
    /// Group-time average treatment effects with multiplier bootstrap.
    Gta,
    /// Adoption-timing and pre-treatment balance regressions.
    DiagnoseTiming,
}

fn run(cli: Cli) -> smokeshift_cli::Result<()> {
    let config_path = cli
        .config
        .ok_or_else(|| smokeshift_cli::Error::Config("--config is required".to_owned()))?;
    let mut config = RunConfig::load(&config_path)?;
    config.apply_overrides(cli.seed, cli.threads, cli.out)?;

    env_logger::Builder::from_env(
        env_logger::Env::default().filter_or("SMOKESHIFT_LOG", &config.log_level),
    )
    .try_init()
    .ok();

    rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build_global()
        .ok();

    let (kind, bin_width) = match cli.command {
        Command::Simulate => (CommandKind::Simulate, None),
        Command::Assign => (CommandKind::Assign, None),
        Command::Plume => (CommandKind::Plume, None),
        Command::EventStudy { bin_width } => (CommandKind::EventStudy, bin_width),
        Command::Did => (CommandKind::Did, None),
        Command::Gta => (CommandKind::Gta, None),
        Command::DiagnoseTiming => (CommandKind::DiagnoseTiming, None),
    };
    dispatch(kind, &config, bin_width)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

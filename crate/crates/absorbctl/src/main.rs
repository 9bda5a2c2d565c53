use std::path::PathBuf;
use std::process::ExitCode;

use absorbctl::{load_config, run, CliError, Command};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Subcommand {
    Simulate,
    Verify,
    PredictorStudy,
    Sweep,
    Tune,
}

impl From<Subcommand> for Command {
    fn from(s: Subcommand) -> Self {
        match s {
            Subcommand::Simulate => Command::Simulate,
            Subcommand::Verify => Command::Verify,
            Subcommand::PredictorStudy => Command::PredictorStudy,
            Subcommand::Sweep => Command::Sweep,
            Subcommand::Tune => Command::Tune,
        }
    }
}

/// Closed-loop simulation and assumption checks for delayed sampled-data
/// observers with predictor feedback.
///
/// Exit codes: 0 success, 1 a check or decay target failed, 2 configuration
/// error, 3 runtime error.
#[derive(Debug, Parser)]
#[command(name = "absorbctl", version)]
struct Cli {
    #[arg(value_enum)]
    command: Subcommand,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override one configuration key, e.g. `--set N=32`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(&cli.config, &cli.overrides).and_then(|setup| run(cli.command.into(), &setup, &cli.out));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("absorbctl: {e}");
            if let CliError::Failed(_) = e {
                eprintln!("absorbctl: outputs were written to {}", cli.out.display());
            }
            ExitCode::from(e.exit_code())
        }
    }
}

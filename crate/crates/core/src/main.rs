use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wrladder::experiments::{run_experiment, ExperimentConfig, ExperimentId};

/// Run one WR/OWR experiment and write its CSV files and manifest.
#[derive(Debug, Parser)]
#[command(name = "wrladder", version)]
struct Cli {
    experiment_id: ExperimentId,
    /// TOML file with settings overrides
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single override `key=value`, applied after the config file; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors, matching config errors
    let cli = Cli::parse();
    let result = ExperimentConfig::from_sources(cli.experiment_id, cli.config.as_deref(), &cli.sets, cli.out)
        .and_then(|cfg| run_experiment(&cfg));
    match result {
        Ok(m) => {
            eprintln!(
                "{}: wrote {} files in {:.2} s",
                cli.experiment_id.name(),
                m.files.len() + 1,
                m.wall_clock_seconds
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

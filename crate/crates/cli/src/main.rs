//! `sma`: scenario-driven runner for the SMA link simulator.
//!
//! Subcommands:
//! - `run --config <file-or-preset>`: execute every scenario/metric sweep and
//!   write one CSV per curve (plus plot scripts with `--plots`).
//! - `list-presets`: show the embedded preset configs.
//! - `validate --config <file-or-preset>`: parse and validate without running.
//!
//! Exit codes: 0 success, 1 validation failure, 2 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sma_core::config;
use sma_core::runner::{self, ConfigSource, RunConfig};

#[derive(Parser)]
#[command(name = "sma", version, about = "SMA downlink link-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweeps of a config and write CSV results.
    Run(RunArgs),
    /// List the embedded preset configs.
    ListPresets,
    /// Parse and validate a config without running it.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file path, or the name of an embedded preset (fig2, fig3, fig4).
    #[arg(long)]
    config: String,
    /// Override the per-point trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the SNR grid (comma-separated dB values).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    snr_db: Option<Vec<f64>>,
    /// Output directory for CSVs and plot scripts.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Also emit a matplotlib plot script per metric.
    #[arg(long)]
    plots: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Config file path, or the name of an embedded preset.
    #[arg(long)]
    config: String,
}

fn run_config(args: &RunArgs) -> RunConfig {
    RunConfig {
        source: ConfigSource::from_arg(&args.config),
        out_dir: args.out.clone(),
        trials: args.trials,
        seed: args.seed,
        snr_db: args.snr_db.clone(),
        emit_plots: args.plots,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match runner::run(&run_config(&args)) {
            Ok(report) => {
                println!("run `{}` wrote {} files:", report.name, report.files.len());
                for f in &report.files {
                    println!("  {}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(err.exit_code() as u8)
            }
        },
        Command::ListPresets => {
            for &name in config::preset_names() {
                let parsed = config::parse_config(
                    config::preset_text(name).expect("embedded preset exists"),
                )
                .expect("embedded presets are valid");
                let metrics: Vec<&str> =
                    parsed.metrics.iter().map(|m| m.name()).collect();
                let scenarios: Vec<&str> =
                    parsed.scenarios.iter().map(|(n, _)| n.as_str()).collect();
                println!(
                    "{name}: metrics [{}], scenarios [{}]",
                    metrics.join(", "),
                    scenarios.join(", ")
                );
            }
            ExitCode::SUCCESS
        }
        Command::Validate(args) => {
            let rc = RunConfig {
                source: ConfigSource::from_arg(&args.config),
                out_dir: PathBuf::from("."),
                trials: None,
                seed: None,
                snr_db: None,
                emit_plots: false,
            };
            match runner::validate(&rc) {
                Ok(parsed) => {
                    println!(
                        "`{}` is valid: {} scenarios, {} metrics",
                        parsed.name,
                        parsed.scenarios.len(),
                        parsed.metrics.len()
                    );
                    ExitCode::SUCCESS
                }
                Err(err) => {
                    eprintln!("error: {err}");
                    ExitCode::from(err.exit_code() as u8)
                }
            }
        }
    }
}

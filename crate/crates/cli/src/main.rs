use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ujel_cli::commands::{cmd_ci, cmd_estimate, cmd_selftest, cmd_simulate, DataArgs};
use ujel_cli::report::OutputFormat;
use ujel_cli::AppResult;

/// Estimation and confidence intervals for expectations of multi-sample
/// U-statistic kernels (three-class VUS and k-class HUM differences built
/// in), plus a deterministic Monte Carlo coverage harness.
#[derive(Parser)]
#[command(name = "ujel", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point estimate and jackknife standard error for a dataset.
    Estimate {
        /// One CSV per group, or a single CSV with --group-col.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Column holding group labels (single-file layout).
        #[arg(long)]
        group_col: Option<String>,
        /// Comma-separated group order, required with --group-col.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        /// Built-in kernel: vus-diff, hum-diff, vus, prob-order.
        #[arg(long, default_value = "vus-diff")]
        kernel: String,
        #[arg(long, env = "UJEL_SEED", default_value_t = 0)]
        seed: u64,
        /// Output format: text-table, json, csv.
        #[arg(long, default_value = "text-table")]
        format: String,
    },
    /// Confidence intervals by one or more methods at one or more levels.
    Ci {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        group_col: Option<String>,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        #[arg(long, default_value = "vus-diff")]
        kernel: String,
        /// Comma-separated subset of jel, normal, kernel-boot.
        #[arg(long, value_delimiter = ',', default_value = "jel,normal,kernel-boot")]
        method: Vec<String>,
        /// Confidence level; repeat or comma-separate for several.
        #[arg(long, value_delimiter = ',', default_values_t = [0.95])]
        level: Vec<f64>,
        /// Bootstrap replicates for kernel-boot.
        #[arg(long = "boot-B", default_value_t = 100)]
        boot_b: usize,
        #[arg(long, env = "UJEL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[arg(long, default_value = "text-table")]
        format: String,
    },
    /// Monte Carlo coverage study driven by a TOML scenario file.
    Simulate {
        config: PathBuf,
        /// Replications per row (overrides the config).
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, env = "UJEL_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "text-table")]
        format: String,
    },
    /// Built-in consistency checks; exits nonzero on any failure.
    Selftest {
        #[arg(long, env = "UJEL_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> AppResult<String> {
    match cli.command {
        Command::Estimate {
            files,
            group_col,
            order,
            kernel,
            seed,
            format,
        } => {
            let format: OutputFormat = format.parse()?;
            let data_args = DataArgs {
                files,
                group_col,
                order,
            };
            cmd_estimate(&data_args, &kernel, seed, format)
        }
        Command::Ci {
            files,
            group_col,
            order,
            kernel,
            method,
            level,
            boot_b,
            seed,
            workers,
            format,
        } => {
            let format: OutputFormat = format.parse()?;
            let data_args = DataArgs {
                files,
                group_col,
                order,
            };
            cmd_ci(
                &data_args, &kernel, &method, &level, boot_b, seed, workers, format,
            )
        }
        Command::Simulate {
            config,
            reps,
            seed,
            workers,
            format,
        } => {
            let format: OutputFormat = format.parse()?;
            cmd_simulate(&config, reps, seed, workers, format)
        }
        Command::Selftest { seed } => cmd_selftest(seed),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => print!("{output}"),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

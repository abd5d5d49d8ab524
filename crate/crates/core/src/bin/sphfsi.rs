use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sphfsi::scenario::runner::{run, RunOptions, Workers, OUT_DIR_ENV};
use sphfsi::scenario::PRESETS;

/// Exit codes: 0 success, 2 configuration error, 3 runtime assertion
/// (escaped particle, step limit, coincident particles), 1 I/O failure.
#[derive(Parser)]
#[command(name = "sphfsi", version, about = "SPH fluid-structure interaction with phase transitions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a TOML scenario file.
    Run {
        /// Preset name or path to a scenario file.
        target: String,
        #[arg(long)]
        dx: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        /// Worker count, or a range `A..B` for a strong scaling study.
        #[arg(long)]
        workers: Option<Workers>,
        /// Output directory (the environment variable SPHFSI_OUT_DIR wins).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the presets.
    Presets,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for p in PRESETS {
                println!("{p}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { target, dx, dt, t_end, workers, out, seed } => {
            let opts = RunOptions { dx, dt, t_end, workers, out, seed };
            match run(&target, &opts) {
                Ok(s) => {
                    println!("{}: {} steps to t = {:.6e}, output in {}", s.name, s.steps, s.time, s.out_dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    if std::env::var_os(OUT_DIR_ENV).is_none() && matches!(e, sphfsi::Error::Io { .. }) {
                        eprintln!("hint: set --out or {OUT_DIR_ENV} to a writable directory");
                    }
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}

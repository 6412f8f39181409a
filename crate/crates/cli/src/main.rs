//! `mfrn` — mean-field analysis of randomly initialized residual networks.
//!
//! Subcommands: `predict` (recurrences + closed-form asymptotics),
//! `simulate` (Monte Carlo validation), `verify` (invariant suite),
//! `sweep` (hyperparameter grids). Exit codes: 0 success, 1 verification
//! failure, 2 configuration error.

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mfrn_cli::config::ExperimentConfig;
use mfrn_cli::{predict, simulate, sweep, verify};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mfrn", version, about = "Mean-field dynamics of random residual networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean-field trajectories (CSV) and closed-form asymptotics (JSON).
    Predict {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's `outputs`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo simulation plus z-score comparison against theory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant/property suite; exits 1 if any check fails.
    Verify {
        /// Check profile: default | kernel-identities | strict.
        #[arg(long, default_value = "default")]
        profile: String,
        /// Also write the JSON report into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-axis hyperparameter grid of depth-L quantities.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    cfg.validate()
        .with_context(|| format!("validating config {}", path.display()))?;
    Ok(cfg)
}

fn out_dir(cfg: Option<&ExperimentConfig>, flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| cfg.and_then(|c| c.outputs.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn init_threads() {
    if let Ok(n) = std::env::var("MFRN_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Predict { config, out } => {
            let cfg = load_config(&config)?;
            predict::run(&cfg, &out_dir(Some(&cfg), out))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { config, out } => {
            let cfg = load_config(&config)?;
            simulate::run(&cfg, &out_dir(Some(&cfg), out))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { profile, out } => {
            let report = verify::run_profile(&profile)?;
            let json = serde_json::to_string_pretty(&report)?;
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("verify.json"), &json)?;
            }
            println!("{json}");
            if report.all_passed {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Sweep { config, out } => {
            let cfg = load_config(&config)?;
            sweep::run(&cfg, &out_dir(Some(&cfg), out))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod error;
mod holdout;
mod report;
mod select;
mod simulate;

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cvc", version, about = "Cross-validation with confidence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Confidence set and selections for candidates on a CSV dataset.
    Select(select::SelectArgs),
    /// Run a simulation study.
    Simulate(simulate::SimulateArgs),
    /// Repeated train/hold-out comparison of cv, cvc and the 1-SE rule.
    Holdout(holdout::HoldoutArgs),
}

/// Options shared by every command.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Level of each test; candidates with p-value >= alpha are kept.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Screening level (default alpha / 10).
    #[arg(long)]
    pub alpha_prime: Option<f64>,
    /// Bootstrap replications.
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    /// Master seed; falls back to CVC_SEED, then to a fresh random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Disable inequality screening.
    #[arg(long)]
    pub no_screen: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory for report.json and tables/.
    #[arg(long, default_value = "cvc-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    Env,
    Random,
}

impl CommonArgs {
    pub fn cvc_config(&self, seed: u64) -> cvc::CvcConfig {
        cvc::CvcConfig {
            folds: self.folds,
            alpha: self.alpha,
            alpha_prime: self.alpha_prime,
            screen: !self.no_screen,
            bootstrap_reps: self.bootstrap,
            seed,
            mode: cvc::ValidationMode::VFold,
        }
    }

    pub fn resolve_seed(&self) -> Result<(u64, SeedSource), CliError> {
        if let Some(s) = self.seed {
            return Ok((s, SeedSource::Flag));
        }
        if let Ok(v) = std::env::var("CVC_SEED") {
            let s = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("CVC_SEED is not an unsigned integer: {v:?}")))?;
            return Ok((s, SeedSource::Env));
        }
        use std::hash::{BuildHasher, Hasher};
        let s = std::collections::hash_map::RandomState::new().build_hasher().finish();
        Ok((s, SeedSource::Random))
    }
}

fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Select(a) => {
            init_threads(a.common.threads)?;
            select::run(&a)
        }
        Command::Simulate(a) => {
            init_threads(a.common().threads)?;
            simulate::run(&a)
        }
        Command::Holdout(a) => {
            init_threads(a.common.threads)?;
            holdout::run(&a)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

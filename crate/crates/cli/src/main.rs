//! `friendly`: experiment runner for friendly-core.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{Run, ScientificFailure};
use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "friendly", version, about = "Diophantine approximation experiments on self-similar fractals")]
struct Cli {
    /// Experiment config (TOML). Without it the built-in defaults are used.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Doubling, decay and regularity certificates.
    Certify,
    /// Empirical layer masses against the decay envelope.
    Decay,
    /// Hyperplane witnesses for random balls.
    LemmaAudit,
    /// Dimension bounds next to box-count estimates.
    DimReport,
    /// Convergence verdicts for the three sums.
    Sums,
    /// Cost of the C(D_n) covers.
    CoverCost,
    /// Points drawn from the natural measure.
    Sample,
}

fn run(cli: Cli) -> Result<()> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            anyhow::bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("cannot start worker pool")?;
    }
    let mut config = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    let out = commands::output_dir(cli.out.as_deref(), &config);
    let cx = Run::new(config, out);
    match cli.command {
        Command::Certify => commands::certify(&cx),
        Command::Decay => commands::decay(&cx),
        Command::LemmaAudit => commands::lemma_audit_cmd(&cx),
        Command::DimReport => commands::dim_report(&cx),
        Command::Sums => commands::sums(&cx),
        Command::CoverCost => commands::cover_cost(&cx),
        Command::Sample => commands::sample(&cx),
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ScientificFailure>().is_some() {
        return 2;
    }
    match e.downcast_ref::<friendly_core::Error>() {
        Some(friendly_core::Error::CertificationFailed(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_failures_map_to_two() {
        let cert = anyhow::Error::from(friendly_core::Error::CertificationFailed("x".into()));
        assert_eq!(exit_code(&cert), 2);
        assert_eq!(exit_code(&ScientificFailure("simplex".into()).into()), 2);
        let usage = anyhow::Error::from(friendly_core::Error::InvalidArgument("x".into()));
        assert_eq!(exit_code(&usage), 1);
        assert_eq!(exit_code(&anyhow::anyhow!("bad config")), 1);
    }
}

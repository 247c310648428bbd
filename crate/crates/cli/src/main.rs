//! `ridgequad` command-line driver.
//!
//! Exit codes: 0 on success, 1 on numerical or I/O failure, 2 on a usage
//! error.

mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use config::{resolve, Cli, Command, StudyConfig, UsageError};

fn configure_threads(cfg: &StudyConfig) -> anyhow::Result<()> {
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global()
        .map_err(|e| anyhow::anyhow!("cannot start thread pool: {e}"))?;
    #[cfg(not(feature = "parallel"))]
    let _ = cfg;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = cli.config.as_deref();
    let cfg = match &cli.command {
        Command::Density(c) | Command::Quadrature(c) => resolve(c, None, None, cli.threads, config)?,
        Command::Approx(a) => resolve(&a.common, Some(a), None, cli.threads, config)?,
        Command::NearApprox(n) => resolve(&n.common, None, Some(n), cli.threads, config)?,
    };
    configure_threads(&cfg)?;
    match cli.command {
        Command::Density(_) => commands::density(&cfg),
        Command::Quadrature(_) => commands::quadrature(&cfg),
        Command::Approx(_) => commands::approx(&cfg),
        Command::NearApprox(_) => commands::near_approx(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xxz_cli::cache::Cache;
use xxz_cli::commands;
use xxz_cli::config::{
    self, BaeConfig, ContinueConfig, DispersionConfig, FitConfig, ReproduceConfig, RootsConfig, SpectrumConfig,
    ThermoConfig,
};
use xxz_cli::error::{CliError, Result};
use xxz_cli::reproduce::{reproduce, FIGURES};

/// Root patterns, exact diagonalization and thermodynamic limits of the
/// antiperiodic XXZ chain.
///
/// Every key of the `[command]` table in the config file is also a flag of
/// the same name; flags take precedence. Exit status: 0 success, 1 invalid
/// input or failed check, 2 numerical failure.
#[derive(Parser, Debug)]
#[command(name = "xxz", version)]
struct Cli {
    /// TOML file with one table per subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Joint eigenbasis with roots and classification, as JSON
    Spectrum(SpectrumConfig),
    /// Zero roots of selected records, as CSV
    Roots(RootsConfig),
    /// Continue an ED root set from its θ to the homogeneous chain
    Continue(ContinueConfig),
    /// Multi-start solve of the Bethe equations (θ = 0, N <= 6)
    Bae(BaeConfig),
    /// Thermodynamic-limit density, energies and gap for one case
    Thermo(ThermoConfig),
    /// Finite-size deviation sweep and decay fit
    Fit(FitConfig),
    /// Single-excitation dispersion (t, ε, ζ), as CSV
    Dispersion(DispersionConfig),
    /// Data and check manifest for one figure, or all
    Reproduce(ReproduceConfig),
}

macro_rules! resolved {
    ($cli:expr, $name:literal, $flags:expr) => {{
        let cfg = config::resolve($cli.config.as_deref(), $name, $flags)?;
        let cache = if cfg.no_cache.unwrap_or(false) {
            Cache::disabled()
        } else {
            Cache::new(config::cache_dir($flags.cache_dir.as_deref(), cfg.cache_dir.as_deref()))
        };
        (cfg, cache)
    }};
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Spectrum(flags) => {
            let (cfg, cache) = resolved!(cli, "spectrum", flags);
            commands::spectrum(&cfg, &cache)?;
        }
        Command::Roots(flags) => {
            let (cfg, cache) = resolved!(cli, "roots", flags);
            commands::roots(&cfg, &cache)?;
        }
        Command::Continue(flags) => {
            let (cfg, cache) = resolved!(cli, "continue", flags);
            commands::continue_cmd(&cfg, &cache)?;
        }
        Command::Bae(flags) => {
            let (cfg, cache) = resolved!(cli, "bae", flags);
            commands::bae(&cfg, &cache)?;
        }
        Command::Thermo(flags) => {
            let (cfg, _) = resolved!(cli, "thermo", flags);
            commands::thermo(&cfg)?;
        }
        Command::Fit(flags) => {
            let (cfg, cache) = resolved!(cli, "fit", flags);
            commands::fit(&cfg, &cache)?;
        }
        Command::Dispersion(flags) => {
            let (cfg, _) = resolved!(cli, "dispersion", flags);
            commands::dispersion_cmd(&cfg)?;
        }
        Command::Reproduce(flags) => {
            let (cfg, cache) = resolved!(cli, "reproduce", flags);
            let figure = cfg
                .figure
                .as_deref()
                .ok_or_else(|| CliError::Config("missing key `figure`".into()))?;
            let figures: Vec<&str> = if figure == "all" { FIGURES.to_vec() } else { vec![figure] };
            let out = commands::out_dir(cfg.out.as_deref());
            let mut failed = 0;
            let mut first_failure = PathBuf::new();
            for f in figures {
                let m = reproduce(f, &out, &cache)?;
                for c in &m.checks {
                    let verdict = if c.passed { "PASS" } else { "FAIL" };
                    match (c.detail.is_empty(), c.measured) {
                        (false, _) => println!("{f}: {verdict} {}: {}", c.name, c.detail),
                        (true, Some(x)) => println!("{f}: {verdict} {}: {x:.3e} ({})", c.name, c.expected),
                        (true, None) => println!("{f}: {verdict} {}", c.name),
                    }
                }
                if failed == 0 && m.failures() > 0 {
                    first_failure = out.join(f).join("manifest.json");
                }
                failed += m.failures();
            }
            if failed > 0 {
                return Err(CliError::ChecksFailed {
                    failed,
                    manifest: first_failure,
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

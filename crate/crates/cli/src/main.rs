mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use bec_cavity::moments::{SemiclassicalVariant, DEFAULT_SEED_AMPLITUDE};
use clap::{Parser, Subcommand, ValueEnum};

use commands::{Command, RunConfig, Status};
use config::ConfigFile;
use error::CliError;

#[derive(Parser)]
#[command(name = "bec-cavity", version, about = "Spectra, dynamics and stability maps for a two-component condensate in a lossy cavity")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Sectioned key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Initial cavity amplitude <a(0)>.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED_AMPLITUDE)]
    seed_amplitude: f64,
    /// Which w multiplies the lambda_S term of the first spin equation.
    #[arg(long, global = true, value_enum, default_value_t = Variant::Corrected)]
    variant: Variant,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Rapidities (JSON) and eigenvalue lattice (CSV) of one branch.
    Spectrum,
    /// Gaussian moment dynamics and spin observables.
    Evolve,
    /// Stability over a (phi, omega) grid.
    PhaseDiagram,
    /// Closed-system frequencies and phase label.
    Closed,
    /// Exact finite-size Liouvillian spectrum and perturbative comparison.
    Finite,
    /// Factorized mean-field equations.
    Semiclassical,
}

#[derive(ValueEnum, Clone, Copy)]
enum Variant {
    Printed,
    Corrected,
}

fn prepare(cli: &Cli) -> Result<RunConfig, CliError> {
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            ConfigFile::parse(&text)?
        }
        None => ConfigFile::default(),
    };
    if cli.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    if !cli.seed_amplitude.is_finite() {
        return Err(CliError::Usage("--seed-amplitude must be finite".into()));
    }
    let finite_budget = match std::env::var("GL_MEM_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("GL_MEM_BUDGET must be a positive integer, got `{v}`")))?,
        Err(_) => commands::default_finite_budget(),
    };
    let command = match cli.command {
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Evolve => Command::Evolve,
        Cmd::PhaseDiagram => Command::PhaseDiagram,
        Cmd::Closed => Command::Closed,
        Cmd::Finite => Command::Finite,
        Cmd::Semiclassical => Command::Semiclassical,
    };
    let variant = match cli.variant {
        Variant::Printed => SemiclassicalVariant::Printed,
        Variant::Corrected => SemiclassicalVariant::Corrected,
    };
    Ok(RunConfig { command, config, out: cli.out.clone(), seed_amplitude: cli.seed_amplitude, variant, finite_budget })
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let cfg = match prepare(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cfg) {
        Ok((status, files)) => {
            for f in files {
                println!("{}", f.display());
            }
            match status {
                Status::Complete => ExitCode::SUCCESS,
                Status::Partial => {
                    eprintln!("warning: some sweep cells failed; see the JSON sidecar");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

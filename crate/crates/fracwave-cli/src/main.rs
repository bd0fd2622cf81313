mod commands;
mod config;
mod error;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fracwave", version, about = "Fractional Helmholtz scattering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Realization seed, overriding the first entry of `sweep.seeds`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the Green's function at the configured (k, |x|) points.
    GreenEval {
        /// Use only the large-argument form; refuses points below the crossover.
        #[arg(long)]
        asymptotic_only: bool,
    },
    /// Draw one source realization and report Monte-Carlo moments.
    SampleField,
    /// Far-field sweep over the configured wavenumbers (resumable).
    Forward,
    /// Reconstruct the strengths from a far-field table.
    Recover {
        /// Far-field table; defaults to the forward output for the seed.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Check admissibility and grid resolution without running anything.
    Validate,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli.config.ok_or_else(|| CliError::Validation("--config <path> is required".into()))?;
    let mut cfg = ExperimentConfig::load(&path)?;
    if let Some(out) = cli.out {
        cfg.output.dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.sweep.seeds[0] = seed;
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("cannot configure {n} threads: {e}")))?;
    }
    match cli.command {
        Command::GreenEval { asymptotic_only } => commands::green_eval(&cfg, asymptotic_only),
        Command::SampleField => commands::sample_field_cmd(&cfg),
        Command::Forward => commands::forward(&cfg),
        Command::Recover { table } => commands::recover_cmd(&cfg, table.as_deref()),
        Command::Validate => commands::validate(&cfg),
    }
    .inspect_err(|e| {
        if let CliError::Numerical { diagnostic, .. } = e {
            if std::fs::create_dir_all(cfg.out_dir()).is_ok() {
                let _ = std::fs::write(
                    cfg.out_dir().join("error.json"),
                    serde_json::to_string_pretty(diagnostic).unwrap_or_default(),
                );
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracwave: {e}");
            if let CliError::Numerical { diagnostic, .. } = &e {
                eprintln!("{diagnostic}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

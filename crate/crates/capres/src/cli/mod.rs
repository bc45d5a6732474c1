//! Command-line experiment runner.
//!
//! `capres <experiment> --config <path> [--out <dir>] [--seed <n>]` runs one
//! verification experiment, writes `<experiment>.csv` and `<experiment>.json`
//! into the output directory and exits with 0 (all records pass), 1 (some
//! record fails) or 2 (invalid configuration).

pub mod config;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

use clap::Parser;

pub use config::{ConfigFile, Experiment, ExperimentConfig};
pub use experiments::{run_experiment, Suite};
pub use output::{Check, DataTable, Outcome, Provenance, ResultRecord};

use crate::error::{Error, Result};

/// Exit status: every record passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status: at least one record failed.
pub const EXIT_FAIL: i32 = 1;
/// Exit status: the configuration is invalid.
pub const EXIT_CONFIG: i32 = 2;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "CAPRES_THREADS";

/// Command-line arguments.
#[derive(Debug, Clone, Parser)]
#[command(name = "capres", version, about = "Numerical verification of Capelli-operator resonances")]
pub struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `output_path`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for sample points (overrides `seed`).
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Loads the configuration named by `args`, applying command-line overrides.
pub fn resolve_config(args: &Args) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(args.experiment, &args.config)?;
    if let Some(out) = &args.out {
        cfg.output_path = out.clone();
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Reads `CAPRES_THREADS` and sizes the global worker pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::InvalidConfig(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidConfig(format!("cannot size the worker pool: {e}")))
}

/// Runs the experiment and writes its tables; returns the exit status.
pub fn run(cfg: &ExperimentConfig) -> i32 {
    let outcome = run_experiment(cfg);
    match output::write_outcome(&cfg.output_path, cfg.experiment.name(), cfg.seed, cfg, &outcome) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    }
    let failed: Vec<&ResultRecord> = outcome.records.iter().filter(|r| !r.passed).collect();
    for r in &failed {
        eprintln!(
            "FAIL {}: computed {} expected {} (abs {}, rel {}) {}",
            r.name,
            r.computed,
            r.expected.map(|e| e.to_string()).unwrap_or_else(|| "n/a".into()),
            r.abs_err.map(|e| format!("{e:.3e}")).unwrap_or_else(|| "n/a".into()),
            r.rel_err.map(|e| format!("{e:.3e}")).unwrap_or_else(|| "n/a".into()),
            r.note
        );
    }
    println!(
        "{}: {} of {} records passed",
        cfg.experiment,
        outcome.records.len() - failed.len(),
        outcome.records.len()
    );
    if failed.is_empty() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Entry point of the binary: parses arguments, validates, runs.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match configure_threads().and_then(|_| resolve_config(&args)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    run(&cfg)
}

//! Command-line front end. Every subcommand reads JSON inputs, runs its
//! checks, writes a canonical JSON report to `--out` and prints a table.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on
//! unreadable or invalid input.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

pub use report::{Check, Input, Report, Status};

use crate::json::SchemaError;

#[derive(Debug, Parser)]
#[command(name = "crlab", version, about = "Pseudo-Hermitian geometry of Heisenberg models and CR contractions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sample evaluation (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed of the default sample plan and of random trials.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a model and optionally verify its group law, brackets and contact form.
    Model {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 16)]
        trials: usize,
    },
    /// Solve the connection and list every tensor.
    Tensors {
        #[arg(long)]
        model: PathBuf,
        /// Conformal factor f: use e^{2f}θ_P instead of θ_P.
        #[arg(long)]
        conformal: Option<PathBuf>,
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Cross-validate change formulas against direct recomputation.
    Conformal {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Iterate towards the canonical contact form of a contraction.
    Canonical {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        theta: PathBuf,
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Canonical form, tensor decay, flatness and recovery of the model.
    Pipeline {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        theta: PathBuf,
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Decide unitary congruence of two model matrices.
    Classify {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        pprime: PathBuf,
    },
    /// Check that a rational map is CR and extract its rigid form.
    Crcheck {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        dst: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Test local equivalence with the model.
    Flatness {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        conformal: Option<PathBuf>,
        #[arg(long)]
        samples: Option<PathBuf>,
    },
}

/// Input problems; they map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Schema { path: String, source: SchemaError },
    #[error("{0}")]
    Invalid(String),
}

impl From<crate::Error> for InputError {
    fn from(e: crate::Error) -> Self {
        InputError::Invalid(e.to_string())
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {} worker threads: {e}", cli.threads);
            return 2;
        }
    };
    let start = Instant::now();
    let result = pool.install(|| commands::dispatch(&cli));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Some(out) = &cli.out {
        let text = crate::json::to_canonical_string(&report.to_value());
        if let Err(e) = std::fs::write(out, text) {
            eprintln!("error: {}: {e}", out.display());
            return 2;
        }
    }
    print!("{}", report.table(start.elapsed()));
    if report.passed() {
        0
    } else {
        1
    }
}

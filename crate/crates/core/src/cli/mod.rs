//! Command-line front end.
//!
//! Every subcommand resolves its configuration from defaults, then an
//! optional JSON file (`--config`), then flags, and echoes the result to
//! stderr. Exit codes: 0 success, 1 input or configuration error, 2 a
//! detected physics or consistency violation.

mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::hardy_core::analytic::HalfPlane;

pub use config::{CausalConfig, CompareConfig, DecayConfig, EnsembleConfig, EvolveConfig, HardyCheckConfig, KkConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hardylab",
    version,
    about = "Hardy-class wave functions, semigroup evolution and decay statistics"
)]
pub struct Cli {
    /// Worker threads for library-level parallelism.
    #[arg(long, global = true, env = "HARDYLAB_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HalfPlaneArg {
    Upper,
    Lower,
}

impl From<HalfPlaneArg> for HalfPlane {
    fn from(h: HalfPlaneArg) -> Self {
        match h {
            HalfPlaneArg::Upper => HalfPlane::Upper,
            HalfPlaneArg::Lower => HalfPlane::Lower,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON file with the command configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Primary output file (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dispersion-relation round trip on sampled boundary values.
    KkCheck {
        #[command(flatten)]
        common: Common,
        /// CSV `x,re,im`.
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        half_plane: Option<HalfPlaneArg>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Causal (half-line Fourier) transform of a signal supported on t ≥ 0.
    CausalTransform {
        #[command(flatten)]
        common: Common,
        /// CSV `x,re,im` of time-domain samples.
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Closed-form signal as JSON `{"kind": ..., "params": ...}`.
        #[arg(long)]
        signal: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        omega_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        omega_max: Option<f64>,
        #[arg(long)]
        omega_points: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Hardy criterion line integrals of a model or sampled function.
    HardyCheck {
        #[command(flatten)]
        common: Common,
        /// CSV `x,re,im`.
        #[arg(long, short)]
        input: Option<PathBuf>,
        /// Analytic model as JSON `{"kind": ..., "params": ...}`.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum)]
        half_plane: Option<HalfPlaneArg>,
        /// Comma-separated offsets γ.
        #[arg(long, value_delimiter = ',')]
        offsets: Option<Vec<f64>>,
    },
    /// Semigroup evolution of a Lorentzian state or observable.
    Evolve {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        /// Evolve the observable instead of the state.
        #[arg(long)]
        observable: bool,
        /// Emit the energy distribution on this many points of [0, e_max].
        #[arg(long)]
        distribution_points: Option<usize>,
    },
    /// Transition probability P(t) and its decay rate.
    Decay {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        t_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t_max: Option<f64>,
        #[arg(long)]
        t_points: Option<usize>,
        /// Append an exponential fit of P(t).
        #[arg(long)]
        fit: bool,
        #[arg(long)]
        fit_lo: Option<f64>,
        #[arg(long)]
        fit_hi: Option<f64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Simulated decay ensemble on the lab clock.
    Ensemble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Survival CSV on the event step grid.
        #[arg(long)]
        survival: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// z-scores of an event file against a theory curve.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Event CSV `i,T_prep,T_reg,t`.
        #[arg(long)]
        events: Option<PathBuf>,
        /// Theory CSV with `t` and `p` columns.
        #[arg(long)]
        theory: Option<PathBuf>,
        /// Exponential theory `e^{-Γt}` instead of a file.
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        threshold: Option<f64>,
    },
}

/// Outcome of a command that ran to completion.
pub(crate) enum Outcome {
    Ok,
    Violation(String),
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // a pool built earlier in the process is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match commands::dispatch(cli.command, out, err) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Violation(msg)) => {
            let _ = writeln!(err, "violation: {msg}");
            EXIT_VIOLATION
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_physics_violation() {
        EXIT_VIOLATION
    } else {
        EXIT_INPUT
    }
}

/// Entry point of the `hardylab` binary.
pub fn main_exit() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

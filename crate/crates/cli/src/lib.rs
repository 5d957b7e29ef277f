//! `qwl`: command-line access to coined walk limits, chiral projections and Lie closures.
//!
//! [`run`] turns parsed arguments into the full report text without touching
//! the filesystem for output, so a failing command never leaves a partial file.

mod commands;
pub mod specs;

use clap::{Parser, ValueEnum};
use thiserror::Error;

pub use commands::run;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Walk dimensions, shift order, degree and graph spectrum.
    Info,
    /// Single-step and repeated-limit errors of a protocol against its limit.
    Converge,
    /// Distance of a seeded random state evolved by the repeated protocol from the limit evolution.
    Evolve,
    /// Chiral projection identities on a cycle walk.
    Project,
    /// Lie closure of the walk's generator set.
    Closure,
    /// Whether a Hamiltonian lies in the walk's closure.
    Simulable,
    /// End-to-end checks on the four-vertex example walk.
    Example,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "qwl",
    version,
    about = "Continuous-time limits of coined quantum walks"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// cycle:N, lattice:N,D, example or file:PATH
    #[arg(long)]
    pub walk: Option<String>,
    /// strauch, evencyc or file:PATH
    #[arg(long)]
    pub protocol: Option<String>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Comma-separated, strictly ascending repetition counts.
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512,1024")]
    pub m_list: Vec<usize>,
    #[arg(long, default_value_t = qwl_core::liealg::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// csv for converge and evolve (their default), json for every command.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Hermitian matrix (rows of [re, im] pairs) for `simulable`.
    #[arg(long)]
    pub hamiltonian: Option<String>,
    /// Include the closure basis in the `closure` report.
    #[arg(long)]
    pub dump_basis: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad specification `{token}`: {reason}")]
    BadSpec { token: String, reason: String },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] qwl_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for validation errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use qwl_core::Error as E;
        match self {
            CliError::Core(E::IterationCapExceeded(_) | E::Unstable(_)) => 3,
            _ => 2,
        }
    }
}

/// Report text plus whether every checked tolerance held. A report that
/// fails its checks is still written, but the process exits with code 3.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

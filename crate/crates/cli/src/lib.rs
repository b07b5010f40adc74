//! Batch runner for pdlab experiments: JSON configs in, CSV/JSON reports and
//! SVG plots out, with deterministic seeding.

pub mod analysis;
pub mod config;
pub mod error;
pub mod instance;
pub mod output;
pub mod run;
pub mod slow;
pub mod sweep;

pub use config::{AnalysisKind, ExperimentConfig};
pub use error::CliError;
pub use run::{execute, run, RunOptions, RunSummary};
pub use sweep::{sweep, SweepOptions, SweepParam};

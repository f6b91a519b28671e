//! Scenario configuration, the builtin catalog, artifact writers and the
//! post-run diagnostics report.

use std::io;
use std::path::PathBuf;

use crate::FlowError;

pub mod catalog;
pub mod config;
pub mod diag;
pub mod output;
pub mod run;

pub use catalog::{builtin, builtin_text, BUILTIN};
pub use config::{
    parse_config, parse_config_with_overrides, to_toml, ErrorRecord, FlowConfig, Formulation, InitialCurve,
    OutputConfig, OutputFormat, RunRecord, ScenarioConfig, SurfaceConfig,
};
pub use diag::{diag_report, DiagSummary};
pub use output::{read_series, read_snapshot, write_snapshot, SeriesTable};
pub use run::{read_metadata, run_scenario, snapshot_name, RunArtifacts};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("solver failure: {0}")]
    Solver(#[from] FlowError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),
}

impl ScenarioError {
    /// Process exit status: 2 for bad input, 3 for solver failures, 4 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse(_) | ScenarioError::Validation(_) | ScenarioError::UnknownScenario(_) => 2,
            ScenarioError::Solver(_) => 3,
            ScenarioError::Io { .. } | ScenarioError::MissingArtifact(_) => 4,
        }
    }
}

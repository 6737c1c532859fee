//! Experiment harness: campaign configuration, seeded BO-vs-DSA runs, trace
//! and summary files, SVG convergence plots and timing reports.

pub mod campaign;
pub mod config;
pub mod plot;
pub mod report;
pub mod summary;
pub mod trace;

use std::path::PathBuf;

use thiserror::Error;

pub use campaign::run_campaign;
pub use config::{CampaignConfig, ObjectiveConfig};
pub use plot::{emit_convergence_plot, PlotOptions};
pub use report::{emit_timing_report, subset_size_sweep, SweepReport, TimingReport};
pub use summary::{AlgorithmAggregate, CampaignSummary, RunSummary};
pub use trace::{read_trace, write_trace, Trace, TraceOptions};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("run aborted: {0}")]
    Runtime(String),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        HarnessError::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 config, 3 runtime abort, 4 I/O or unreadable
    /// input file.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Runtime(_) => 3,
            HarnessError::Io { .. } | HarnessError::Parse { .. } => 4,
        }
    }
}

//! File formats, instance selection and the experiment runner.

mod edgelist;
mod experiment;
mod select;

use std::fmt;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::AttackError;
use crate::generators::GeneratorError;
use crate::graph::GraphError;
use crate::reduction::ReductionError;

pub use edgelist::{
    format_edge_list, load_edge_list, parse_edge_list, save_edge_list, LoadedGraph,
};
pub use experiment::{
    replay_instance, run_experiments, ExperimentConfig, ExperimentOutput, ExperimentRecord,
    GraphDescriptor, InstanceDescriptor, MethodSummary, RunStatus, RunTiming, Summary,
    DEFAULT_RANKS, DEFAULT_REPETITIONS,
};
pub use select::{select_p_star, select_terminals, TerminalMode, Terminals, MAX_TERMINAL_DRAWS};

/// Why an instance produced no attack runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SkipReason {
    NoTerminals,
    TooFewPaths { rank: usize },
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::NoTerminals => f.write_str("no qualifying terminal pair"),
            SkipReason::TooFewPaths { rank } => write!(f, "fewer than {rank} simple s-t paths"),
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid configuration: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("instance skipped: {0}")]
    Skip(SkipReason),
}

impl HarnessError {
    pub(crate) fn io(path: &FsPath, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Stable machine-readable error class.
    pub fn category(&self) -> &'static str {
        match self {
            HarnessError::Io { .. } => "io",
            HarnessError::Parse { .. } => "parse",
            HarnessError::Config(_) | HarnessError::Toml(_) | HarnessError::Json(_) => "config",
            HarnessError::Graph(_) | HarnessError::Generator(_) | HarnessError::Reduction(_) => {
                "input"
            }
            HarnessError::Attack(e) => attack_category(e),
            HarnessError::Skip(_) => "skip",
        }
    }
}

pub(crate) fn attack_category(e: &AttackError) -> &'static str {
    match e {
        AttackError::Graph(_) => "input",
        AttackError::IterationCap { .. } => "iteration-cap",
        AttackError::EigenNonConvergence { .. } => "non-convergence",
        AttackError::Cover(_) | AttackError::Lp(_) | AttackError::Infeasible => "solver",
    }
}

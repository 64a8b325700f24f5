//! Runs the alignment experiments against models (or the offline mock) and
//! writes the report bundle.

pub mod experiments;
pub mod gateway;
pub mod ledger;
pub mod manifest;
pub mod mock;
pub mod report;

use opinion_align::metrics::MetricsError;
use opinion_align::prompt::PromptError;
use opinion_align::survey::SurveyError;

use gateway::GatewayError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Survey(#[from] SurveyError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("{0}")]
    Io(String),
    #[error("no results in {0}")]
    NoResults(String),
    #[error("run interrupted after {completed} requests; re-run to resume from cache")]
    Interrupted { completed: usize },
}

impl HarnessError {
    /// Short machine-readable class printed as `error[class]`.
    pub fn class(&self) -> &'static str {
        match self {
            HarnessError::Config(_) | HarnessError::Prompt(_) => "config",
            HarnessError::Data(_) | HarnessError::Survey(_) => "data",
            HarnessError::Metrics(_) => "metrics",
            HarnessError::Gateway(g) => match g {
                GatewayError::Config(_) => "config",
                GatewayError::Transport { .. } => "transport",
                GatewayError::Provider { .. } => "provider",
                GatewayError::Mock(_) => "mock",
                GatewayError::Cache(_) => "io",
                GatewayError::Interrupted => "interrupted",
            },
            HarnessError::Io(_) => "io",
            HarnessError::NoResults(_) => "no-results",
            HarnessError::Interrupted { .. } => "interrupted",
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path) -> impl Fn(std::io::Error) -> HarnessError + '_ {
    move |e| HarnessError::Io(format!("{}: {e}", path.display()))
}

use thiserror::Error;

/// Errors raised by model construction, integration, tracking and optimization.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model failed one of its structural checks (convexity, ordering, ...).
    #[error("invalid model: {0}")]
    Model(String),

    /// A numerical stage failed. `stage` names the pipeline step.
    #[error("solver failure in {stage}: {detail}")]
    Solver { stage: &'static str, detail: String },

    /// A configuration document could not be turned into a problem.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn solver(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Solver {
            stage,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

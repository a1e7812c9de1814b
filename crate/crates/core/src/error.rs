use thiserror::Error;

use crate::expr::{DomainError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("in {context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },

    #[error("component {index:?}: {source}")]
    Domain {
        index: Vec<usize>,
        #[source]
        source: DomainError,
    },

    #[error("degenerate metric at {point:?}: |det g| = {det:e}")]
    Degenerate { point: Vec<f64>, det: f64 },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("cyclic sum over slots {slots:?} mixes upper and lower indices")]
    SlotVariance { slots: [usize; 3] },

    #[error("random manifold generation failed after {attempts} attempts")]
    Generation { attempts: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown tensor `{0}`")]
    UnknownTensor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

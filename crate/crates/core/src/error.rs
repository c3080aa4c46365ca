use thiserror::Error;

/// Errors produced by the geometry, quadrature and verification layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("unbounded body")]
    UnboundedBody,

    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("quadrature tolerance not met: achieved {achieved:e}, target {target:e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("argmax search did not converge after {iterations} sweeps; best iterate {best:?} (value {value:e})")]
    ArgmaxNotConverged {
        iterations: usize,
        best: Vec<f64>,
        value: f64,
    },

    #[error("non-finite gauge at probe {index}, direction {direction:?}")]
    NonFiniteGauge { index: usize, direction: Vec<f64> },

    #[error("direction {index}: {source}")]
    Direction {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("monte carlo: {0}")]
    MonteCarlo(String),

    #[error("spec: {0}")]
    Spec(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("tau = {0} is a rational cube; the basis 1, a, a^2 would be dependent")]
    TauIsCube(String),

    #[error("element has nonzero a-coefficients but no tau configuration")]
    MissingTau,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    #[error("not a Hesse configuration: {0}")]
    NotHesse(String),

    #[error("generator {index} is not a symmetry of the decomposition")]
    NotASymmetry { index: usize },

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("non-finite value in numeric candidate")]
    NonFinite,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

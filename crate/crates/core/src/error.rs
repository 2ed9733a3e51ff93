use thiserror::Error;

/// Errors raised by the geometry kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("derivative order {order} not available for a curve of dimension {dim}")]
    Order { order: usize, dim: usize },

    #[error("parameter t = {t} outside the safe domain [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("sampled-table curves support derivatives up to order 3, requested {0}")]
    UnsupportedOrder(usize),

    #[error("curve is null (or nearly so) at t = {t}")]
    NullCurve { t: f64 },

    #[error("frame vector V_{index} is degenerate or null at t = {t}")]
    DegenerateFrame { t: f64, index: usize },

    #[error("curvature k_{index} vanishes at t = {t}: curve is not proper of full order")]
    NotProperOrder { t: f64, index: usize },

    #[error("frame field is discontinuous between samples at t = {t}")]
    FrameDiscontinuity { t: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("need at least {required} samples, got {got}")]
    TooFewSamples { required: usize, got: usize },

    #[error("scalar field '{0}' has no Hessian callback")]
    MissingHessian(String),

    #[error("invalid input: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(GeomError::Dimension { expected, got })
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("n must satisfy n >= 3, got n = {0}")]
    IndexTooSmall(u64),

    #[error("n must not exceed {max}, got n = {n}")]
    IndexTooLarge { n: u64, max: u64 },

    #[error("lambda must be positive and finite, got {0}")]
    InvalidLambda(f64),

    #[error("extreme point requires distinct arguments, got s = t = {0}")]
    CoincidentArguments(f64),

    #[error("coefficient index must be at least 2, got {0}")]
    CoefficientIndex(u32),

    #[error("coefficient vector holds {have} coefficients, {need} required")]
    TooFewCoefficients { have: usize, need: usize },

    #[error("leading coefficient must equal 1, got {0}")]
    NotNormalized(String),

    #[error("point ({u}, {v}) lies outside the square [-1, 1] x [-1, 1]")]
    OutsideSquare { u: f64, v: f64 },

    #[error(
        "gradient is undefined at ({u}, {v}) on the boundary of the square; \
         use the boundary restrictions instead"
    )]
    OnBoundary { u: f64, v: f64 },

    #[error("lambda = {lambda} lies outside the required window {window}")]
    OutsideWindow { lambda: f64, window: String },

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("grid resolution {got} is below the minimum of {min}")]
    GridTooCoarse { got: usize, min: usize },

    #[error("invalid grid specification: {0}")]
    InvalidGridSpec(String),
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("coefficients are not Hermitian (max asymmetry {asymmetry:e} relative to {scale:e})")]
    NotHermitian { asymmetry: f64, scale: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("quadrature error: {0}")]
    Quadrature(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

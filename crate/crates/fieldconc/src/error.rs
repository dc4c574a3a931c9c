use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("coordinate {0} exceeds the supported range (< 2^32)")]
    CoordinateOverflow(u64),
    #[error("rectangle sides must be positive and < 2^32")]
    InvalidRectangle,
    #[error("integer overflow in cardinality computation")]
    Overflow,
    #[error("invalid delta sequence: {0}")]
    InvalidDelta(String),
    #[error("delta constraint violated: sum {0} exceeds 1/(4d^2)")]
    ConstraintViolated(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("product set has an empty factor")]
    EmptyFactor,
    #[error("point not in the compression domain")]
    OutOfDomain,
    #[error("universe needs {required} noise bits, cap is {cap}")]
    UniverseTooLarge { required: u32, cap: u32 },
    #[error("site {0} is not tabulated in the universe")]
    UntabulatedSite(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by network construction, the amplitude engine and the
/// certificate builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("beamsplitter amplitudes not normalized: r^2 + t^2 = {norm} (r = {r}, t = {t})")]
    NonNormalizedSplitter { r: f64, t: f64, norm: f64 },

    #[error("element {index} ({kind}) is invalid: {reason}")]
    InvalidElement {
        index: usize,
        kind: &'static str,
        reason: String,
    },

    #[error("mode {0} is not part of the network")]
    UnknownMode(usize),

    #[error("detector mode {0} is not reachable from any source")]
    DisconnectedDetector(String),

    #[error("mode index {index} declared with conflicting labels {first:?} and {second:?}")]
    ConflictingMode {
        index: usize,
        first: String,
        second: String,
    },

    #[error("transfer matrix is not an isometry (max deviation {deviation:e})")]
    NotIsometry { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("particle number mismatch: sources hold {sources}, outcome counts {detected}")]
    ParticleMismatch { sources: u32, detected: u32 },

    #[error("conditioning event has no probability mass")]
    DegenerateCondition,

    #[error("quadrature grid too coarse: normalization drift {drift:e} exceeds {tol:e}")]
    GridTooCoarse { drift: f64, tol: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Hardy constraint violated: {0}")]
    HardyConstraint(String),

    #[error("correlation has non-vanishing imaginary part {0:e}")]
    NonRealCorrelation(f64),

    #[error("refusing to enumerate {estimate} outcomes (cap {cap})")]
    TooLarge { estimate: u128, cap: u128 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("network description: {0}")]
    Network(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

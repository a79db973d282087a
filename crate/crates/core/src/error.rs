use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty grid")]
    EmptyGrid,

    #[error("empty verification window")]
    EmptyWindow,

    #[error("fewer than 3 usable anti-diagonals ({usable} found)")]
    InsufficientDecayData { usable: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("sampled grid incompatible with the quadrature rule: {0}")]
    IncompatibleGrid(String),

    #[error("singular at truncation (smallest singular value {sigma_min:e})")]
    Singular { sigma_min: f64 },

    #[error("envelope violated: membership constant {observed} exceeds declared {declared}")]
    EnvelopeViolated { observed: f64, declared: f64 },

    #[error("invalid perturbation spec: {0}")]
    InvalidPerturbation(&'static str),

    #[error("contraction factor r = {0} is not below 1")]
    NotContractive(f64),

    #[error("degenerate constants: K = {k} does not exceed r = {r}")]
    DegenerateConstants { k: f64, r: f64 },

    #[error("incompatible weight: {0}")]
    IncompatibleWeight(String),

    #[error("zero-norm sample at index {0}")]
    ZeroNormSample(usize),

    #[error("non-summable pairing: {0}")]
    NonSummable(String),

    #[error("declared growth bound violated at n = {0}")]
    GrowthViolated(usize),

    #[error("malformed matrix data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

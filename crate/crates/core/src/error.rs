use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid DoG parameters: {0}")]
    InvalidParams(String),
    #[error("invalid gamma {0}: must lie strictly inside (0, 1)")]
    InvalidGamma(f64),
    #[error("invalid kernel size {0}: must be odd and at least 3")]
    InvalidSize(usize),
    #[error("degenerate kernel (size {size}, gamma {gamma}): sampled grid has no {missing} entries")]
    DegenerateKernel {
        size: usize,
        gamma: f64,
        missing: &'static str,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("duplicate layer name {0:?}")]
    DuplicateLayerName(String),
    #[error("insufficient points: {distinct} distinct points for k = {k}")]
    InsufficientPoints { distinct: usize, k: usize },
    #[error("ambiguous labeling: centroids {0} and {1} tie on the deciding correlation")]
    AmbiguousLabeling(usize, usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed NPY header: {0}")]
    MalformedHeader(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("truncated data: expected {expected} bytes, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("shape overflow: {0:?}")]
    ShapeOverflow(Vec<usize>),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

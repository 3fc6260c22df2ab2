use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("lattice too large: {0}")]
    SizeOverflow(String),

    #[error("unsupported lattice kind for this operation: {0}")]
    UnsupportedLattice(String),

    #[error("configuration does not belong to this graph (expected length {expected}, got {got})")]
    MismatchedConfig { expected: usize, got: usize },

    #[error("graph has no {0} boundary set")]
    MissingBoundary(&'static str),

    #[error("enumeration cap exceeded: {size} {unit} > cap {cap}")]
    CapExceeded {
        size: usize,
        cap: usize,
        unit: &'static str,
    },

    #[error("all configuration weights are zero")]
    AllZeroWeights,

    #[error("decay rate undefined: {0}")]
    UndefinedRate(String),

    #[error("loop configuration is not an even subgraph")]
    NotEven,

    #[error("contour leaves the domain near ({0}, {1})")]
    ContourOutsideDomain(i32, i32),

    #[error("mid-edge {0} is not on the domain boundary")]
    NotBoundaryMidEdge(usize),

    #[error("degenerate event in mixing estimate: {0}")]
    DegenerateEvent(String),

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

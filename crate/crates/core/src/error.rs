use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate in input point")]
    NonFinite,

    #[error("projection did not converge after {iterations} iterations (residual {residual:e})")]
    ProjectionNotConverged {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error("degenerate normal: hint coincides with base point")]
    DegenerateNormal,

    #[error("insufficient samples: found {found} distinct members in the sampling ball")]
    InsufficientSamples { found: usize },

    #[error("zero gap: point already lies in the set")]
    ZeroGap,

    #[error("no separation: point already lies in the polyhedron")]
    NoSeparation,

    #[error("empty normal bundle")]
    EmptyBundle,

    #[error("two constraints from set {set} in outer iteration {outer} within one QP")]
    DuplicateSource { set: usize, outer: usize },

    #[error("QP iteration limit reached after {iterations} iterations")]
    QpIterationLimit { iterations: usize },

    #[error("insufficient data: {usable} usable errors, need at least {needed}")]
    InsufficientData { usable: usize, needed: usize },

    #[error("no intersection-distance oracle available")]
    NoIntersectionOracle,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

use thiserror::Error;

/// Errors surfaced by any of the numeric modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scale must be strictly positive, got {0}")]
    NonPositiveScale(f64),

    #[error("state is not strictly positive: psi({x}) = {value}")]
    NotPositive { x: f64, value: f64 },

    #[error("state is not square-integrable on the truncation window")]
    NotSquareIntegrable,

    #[error("mixing parameter must lie strictly inside (0,1), got {0}")]
    AlphaOutOfRange(f64),

    #[error("separation must be non-negative, got {0}")]
    NegativeSeparation(f64),

    #[error("decomposition weight leaves (0,1) at x = {x}: f = {value}")]
    WeightOutOfRange { x: f64, value: f64 },

    #[error("state underflows at x = {x}; potential evaluation has no closed form there")]
    DomainExhausted { x: f64 },

    #[error("state must be normalized before this operation")]
    NotNormalized,

    #[error("quadrature did not converge: achieved error {achieved:e} over [{a}, {b}]")]
    QuadratureNoConvergence { a: f64, b: f64, achieved: f64 },

    #[error("quadrature tail bound {bound:e} beyond |x| = {half_width} exceeds abs_tol")]
    TailBoundTooLarge { half_width: f64, bound: f64 },

    #[error("invalid quadrature configuration: {0}")]
    BadQuadratureConfig(String),

    #[error("parameter {name} = {value} outside valid range")]
    BadParameter { name: &'static str, value: f64 },

    #[error("constants for M = {m} violate an internal identity: {detail}")]
    ConstantsInvariant { m: f64, detail: String },

    #[error("separation search exhausted at X = {x_max}; input does not decay")]
    SeparationExhausted { x_max: f64 },

    #[error("certification stage '{stage}' failed: {source}")]
    CertifyStage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("grid must be uniform with n >= 3 and x_min < x_max")]
    BadGrid,

    #[error("eigensolver did not converge within {budget} iterations")]
    EigenNoConvergence { budget: usize },

    #[error("two-level fit is degenerate: left and right well states coincide")]
    DegenerateFit,

    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

use thiserror::Error;

/// Unified error type for every module in the crate.
#[derive(Debug, Error)]
pub enum IsingError {
    #[error("matrix is not antisymmetric (|A + A^T| = {0:e})")]
    NotAntisymmetric(f64),
    #[error("odd dimension {0}: Pfaffian is zero by convention")]
    OddDimension(usize),
    #[error("dimension {0} too large for exact permutation-sum Pfaffian (max 12)")]
    DimensionTooLarge(usize),
    #[error("matrix is singular (Pfaffian zero within tolerance)")]
    Singular,
    #[error("same-boundary auxiliary arcs cross: {0}")]
    CrossingAuxEdges(String),
    #[error("invalid auxiliary pair: {0}")]
    InvalidPair(String),
    #[error("at most one lower-upper crossing auxiliary edge is supported")]
    MultipleCrossings,
    #[error("lattice too large for exhaustive enumeration: L*M = {0} > 24")]
    TooLarge(usize),
    #[error("interaction vertical range {0} exceeds transfer-matrix limit 2")]
    RangeTooLarge(usize),
    #[error("odd tuple length {0}: correlation vanishes by spin-flip symmetry")]
    OddTuple(usize),
    #[error("missing input correlation for tuple {0}")]
    MissingInput(String),
    #[error("quadrature failed self-convergence: delta = {0:e}")]
    QuadratureNotConverged(f64),
    #[error("lattice sum tail did not converge: tail = {0:e}")]
    SumNotConverged(f64),
    #[error("log-log fit rejected: r^2 = {0} below threshold 0.999")]
    FitRejected(f64),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

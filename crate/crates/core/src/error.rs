use thiserror::Error;

/// Everything that can go wrong while building walks, protocols or closures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("matrix is not skew-Hermitian (residual {residual:e})")]
    NotSkewHermitian { residual: f64 },

    #[error("matrix is neither Hermitian nor skew-Hermitian")]
    NonNormalInput,

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: String, got: String },

    #[error("{what} must be at least {min}, got {got}")]
    TooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not regular")]
    NotRegular,

    #[error("coin result {coin} does not map vertices bijectively")]
    NotBijective { coin: usize },

    #[error("move of vertex {vertex} under coin result {coin} does not follow an edge")]
    NotAnEdge { vertex: usize, coin: usize },

    #[error("vertex {vertex} reaches the same neighbour under two coin results")]
    RepeatedNeighbor { vertex: usize },

    #[error("walk description is inconsistent: {0}")]
    InvalidWalk(String),

    #[error("matrix is not a graph Laplacian")]
    NotLaplacian,

    #[error("unstable step: gamma*dt*max_degree = {0} exceeds 1")]
    Unstable(f64),

    #[error("perturbation parameter x = {0} is outside [0, 1)")]
    DomainExceeded(f64),

    #[error("reference trajectory is not a multiple of the identity (residual {residual:e})")]
    NotScalarAtZero { residual: f64 },

    #[error("protocol parts act on different walks")]
    MixedWalks,

    #[error("closure did not terminate within {0} passes")]
    IterationCapExceeded(usize),

    #[error("tolerance {0:e} is outside [1e-12, 1e-6]")]
    ToleranceOutOfRange(f64),

    #[error("walk is not a cycle")]
    NotACycle,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

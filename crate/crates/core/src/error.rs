use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("eigendecomposition did not converge (dim {dim}, frobenius norm {norm:e})")]
    EigenNoConvergence { dim: usize, norm: f64 },

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("operator is zero")]
    ZeroOperator,

    #[error("matrices do not commute (commutator norm {norm:e} between elements {a} and {b})")]
    NotCommuting { a: usize, b: usize, norm: f64 },

    #[error("simultaneous diagonalization failed (residual {0:e})")]
    NoCommonEigenbasis(f64),

    #[error("columns are not orthonormal (residual {0:e})")]
    NotOrthonormal(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("ensemble member {0} is not a pure state")]
    MixedState(usize),

    #[error("random POVM draw was singular after {0} attempts")]
    SingularDraw(usize),

    #[error("empty result: {0}")]
    Empty(&'static str),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

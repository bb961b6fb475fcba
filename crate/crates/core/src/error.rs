use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("WindowMismatch: subspaces live on different ambient windows")]
    WindowMismatch,

    #[error("NotASubspace: a vector lies {deviation:.3e} away from the enclosing subspace")]
    NotASubspace { deviation: f64 },

    #[error("GuardTooSmall: displacement {required} exceeds the guard margin {available}")]
    GuardTooSmall { required: u64, available: u32 },

    #[error("TooManyOperators: {0} operators given, at most 6 are supported")]
    TooManyOperators(usize),

    #[error("PreconditionUnverified: {0}")]
    PreconditionUnverified(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

use crate::rootsys::Weight;

/// Every fallible operation in the crate returns this error.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cone is not full-dimensional (rank {rank} in dimension {dim}); project first")]
    NotFullDimensional { rank: usize, dim: usize },

    #[error("rank {rank} exceeds the cap of {cap} for this computation")]
    RankCap { rank: usize, cap: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("rebuilt cone has primitive generators {found:?}, expected {expected:?}")]
    RebuildMismatch { expected: Vec<Weight>, found: Vec<Weight> },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) | Error::OracleMismatch(_) | Error::RebuildMismatch { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

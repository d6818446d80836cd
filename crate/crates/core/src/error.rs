use std::io;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("seed must contain at least one byte")]
    EmptySeed,

    #[error("seeds cannot be spliced: no usable difference region")]
    SpliceInfeasible,

    #[error("unknown target `{0}`")]
    TargetNotFound(String),

    #[error("input of {len} bytes exceeds the {limit}-byte limit")]
    InputTooLarge { len: usize, limit: usize },

    #[error("experiment needs at least two distinct seeds")]
    CorpusTooSmall,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

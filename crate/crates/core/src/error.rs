use thiserror::Error;

use crate::envs::maze::MazeError;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("environment episode has terminated; reset before stepping")]
    StepAfterTerminal,

    #[error("action {action} is outside the action set of size {size}")]
    InvalidAction { action: usize, size: usize },

    #[error("invalid MDP: {0}")]
    InvalidMdp(String),

    #[error("value iteration did not reach tolerance after {0} sweeps")]
    NotConverged(usize),

    #[error("maze: {0}")]
    Maze(#[from] MazeError),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("aggregation: {0}")]
    Aggregation(String),

    #[error("schedule: {0}")]
    Schedule(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that stem from invalid user configuration rather
    /// than from a failure while running.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse { .. } | Error::InvalidArgument(_) | Error::Schedule(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

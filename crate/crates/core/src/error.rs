use thiserror::Error;

use crate::game::{Player, StrategyKind};

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} is outside the supported range 1..=1024")]
    UnsupportedDimension(usize),

    #[error("matrix rows have inconsistent lengths")]
    Ragged,

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("state vector is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("channel is not trace preserving (max deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("channel has no operators")]
    EmptyChannel,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid subsystem layout: {0}")]
    InvalidSubsystems(String),

    #[error("strategy kind {kind:?} is not admissible for player {player}")]
    StrategyNotAllowed { player: Player, kind: StrategyKind },

    #[error("player {player} owns {expected} turns but the strategy provides {got}")]
    TurnCountMismatch {
        player: Player,
        expected: usize,
        got: usize,
    },

    #[error("move index {index} out of range for player {player} ({available} moves)")]
    UnknownMove {
        player: Player,
        index: usize,
        available: usize,
    },

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("empty strategy domain: {0}")]
    EmptyDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Crate-wide error type. Variants carry the offending value where a
/// report needs it (grid point, time of blowup, ...).
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("Lévy measure violates condition H({part}): {detail}")]
    ConditionHViolation { part: &'static str, detail: String },

    #[error("drift family violates condition A at (x={x}, theta={theta}): {detail}")]
    ConditionAViolation { x: f64, theta: f64, detail: String },

    #[error("invalid Lévy measure specification: {0}")]
    InvalidSpec(String),

    #[error("numerical blowup at t={time}")]
    NumericalBlowup { time: f64 },

    #[error("observation scheme not covered by the path: {0}")]
    InvalidScheme(String),

    #[error("score undefined at y={y}: transition density at or below floor")]
    ScoreUndefined { y: f64 },

    #[error("likelihood ratio undefined: zero transition density under {side}")]
    LikelihoodUndefined { side: &'static str },

    #[error("Fisher information is not positive (I_n={value})")]
    NonpositiveFisher { value: f64 },

    #[error("chain has no unique invariant distribution: {0}")]
    NoUniqueInvariant(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("too many replications failed: {failed} of {total}")]
    TooManyFailures { failed: usize, total: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

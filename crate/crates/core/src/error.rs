use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A conditioning event carries (numerically) no probability mass.
    #[error("degenerate stratum: {0}")]
    DegenerateStratum(String),

    /// An odds was requested for a probability of exactly 0 or 1.
    #[error("odds undefined for probability {0}")]
    OddsUndefined(f64),

    #[error("exposure level {level} out of range for a model with {n_levels} levels")]
    LevelOutOfRange { level: usize, n_levels: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("sample size must be at least 1")]
    EmptySample,
}

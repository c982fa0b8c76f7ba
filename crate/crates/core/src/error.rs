use thiserror::Error;

/// Why a single decode attempt did not return a codeword. These are ordinary
/// experiment outcomes (they count as errors in the empirical rate), not
/// configuration problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeFailure {
    /// No candidate satisfied the decoder's constraints.
    NoCandidate,
    /// Two or more candidates survived; the decoder refuses to guess.
    Ambiguous,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("need {needed} independent vectors but only {available} available")]
    RankShortfall { needed: usize, available: usize },

    #[error("random construction failed to reach full rank after {attempts} attempts")]
    ConstructionFailed { attempts: usize },

    #[error("enumeration would visit more than {limit} elements")]
    EnumerationTooLarge { limit: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("distribution must sum to 1 and have nonnegative entries, got {0:?}")]
    InvalidDistribution(Vec<f64>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

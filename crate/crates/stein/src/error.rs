//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SteinError>;

#[derive(Debug, Clone, Error)]
pub enum SteinError {
    /// An argument fell outside the supported range (e.g. a moment order
    /// beyond the tabulated maximum).
    #[error("range error: {0}")]
    Range(String),

    /// An argument was outside the mathematical domain of the operation
    /// (e.g. a divergent Gaussian exponential moment).
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of the invoked theorem or lemma fails for the given
    /// inputs. Evaluators refuse to emit a number whose hypotheses fail.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// A quadrature or solver configuration could not certify the requested
    /// tolerance; the message carries the achieved estimate.
    #[error("accuracy not certified: {0}")]
    Accuracy(String),

    /// Too few significant points survived the gating rule for a rate fit.
    /// The points that were available are carried as `(n, |delta|, stderr)`.
    #[error("insufficient signal for rate fit: {kept} of {total} points significant")]
    InsufficientSignal {
        kept: usize,
        total: usize,
        points: Vec<(usize, f64, f64)>,
    },

    /// Configuration or input validation failure (CLI layer).
    #[error("invalid input: {0}")]
    Invalid(String),
}

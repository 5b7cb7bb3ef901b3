use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Interval division where the denominator contains zero.
    #[error("interval division by an interval containing zero")]
    DivisionByZero,

    /// A partial operation was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// An operation requiring a square matrix received a non-square one.
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    /// Field-definition text that could not be parsed.
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    /// The a-priori-bounds search did not validate within the retry budget:
    /// the step size is too large for the current set.
    #[error("no validated a-priori enclosure after {attempts} attempts (step h = {step})")]
    RoughEnclosureFailure { step: f64, attempts: usize },

    /// The truncated matrix-exponential series has no convergent tail bound
    /// within the depth cap: the step size is too large for this matrix.
    #[error("series tail does not contract (scaled matrix norm {norm} too large)")]
    SeriesDivergence { norm: f64 },

    /// The enclosure of the inverse of a set basis failed; with orthogonal
    /// bases this indicates severe numerical degeneracy.
    #[error("set basis is numerically singular (orthogonality defect {defect})")]
    SingularBasis { defect: f64 },

    /// The trajectory never crossed the section within the step budget.
    #[error("no section crossing within {steps} steps")]
    NoCrossing { steps: usize },

    /// The flow derivative normal to the section may vanish on the crossing
    /// segment, so the crossing cannot be certified.
    #[error("section crossing could not be certified as transversal")]
    NonTransversal,
}

pub type Result<T> = std::result::Result<T, Error>;

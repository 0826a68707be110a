use thiserror::Error;

/// Library-level error type.
///
/// Arithmetic overflow is deliberately *not* represented here: rationals use
/// checked i128 operations and panic on overflow, since overflow can only
/// mean a bug or an input far outside the geometry's working range.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    /// The parameters describe a link with more than one component.
    #[error("not a knot: parameters give a {components}-component link")]
    NotAKnot { components: usize },

    /// A query outside the validated domain (e.g. r-values of constant paths).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The Seifert-twist calibration could not produce a consistent answer.
    /// This is loud by design: a silent default would corrupt every slope.
    #[error("seifert calibration failure: {0}")]
    Calibration(String),

    /// The knot is on the configured exclusion list (non-hyperbolic cases
    /// the classification does not speak about).
    #[error("excluded knot: {0} is on the non-hyperbolic exclusion list")]
    Excluded(String),

    /// An internal cross-check failed (the two Euler-characteristic routes
    /// disagree, a solved system does not satisfy its constraint, ...).
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

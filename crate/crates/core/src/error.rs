//! Error type shared by all modules of the crate.

/// Errors produced by family validation, matrix assembly and the solvers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// The denominator polynomial is (numerically) zero at a point where it
    /// must be evaluated or divided by.
    #[error("denominator near zero at (s, t) = ({s}, {t}): |w| = {value:e}")]
    DenominatorNearZero { s: f64, t: f64, value: f64 },

    /// A sample matrix does not have the shape required by its grid.
    #[error("sample matrix is {got_rows}x{got_cols}, expected {want_rows}x{want_cols}")]
    DimensionMismatch {
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },

    /// The sampled image of the family has no spatial extent in either
    /// coordinate, so no reference triangle can be built.
    #[error("sampled family image is a single point; cannot build a reference triangle")]
    DegenerateImage,

    /// The reference triangle has (numerically) zero area.
    #[error("reference triangle is degenerate (area {area:e})")]
    DegenerateTriangle { area: f64 },

    /// The singular value decomposition failed to converge.
    #[error("singular value decomposition did not converge")]
    NumericalFailure,

    /// No zero of the envelope function was found in the searched region.
    #[error("no envelope zero set found in the region")]
    EmptyZeroSet,

    /// A user-supplied subdivision center does not lie on the envelope zero
    /// set. Carries |h| at the center for diagnostics.
    #[error("center not on envelope zero set (|h| = {h_abs:e})")]
    CenterOffZeroSet { h_abs: f64 },

    /// A family violates a structural requirement (domain, denominator, ...).
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    /// An argument is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the cocycle toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("phase with imaginary part {im} lies outside the analyticity strip |Im z| <= {strip}")]
    StripExceeded { im: f64, strip: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("matrix is not unimodular: |det - 1| = {0:e}")]
    NotUnimodular(f64),

    #[error("{p}/{q} is not in lowest terms")]
    NonCoprime { p: i64, q: u64 },

    #[error("frequency {alpha} is rational ({p}/{q}) to double precision")]
    RationalInput { alpha: f64, p: i64, q: u64 },

    #[error("no rational approximants available for this frequency")]
    NoConvergents,

    #[error("trace profile has no retained modes")]
    EmptyProfile,

    #[error("no invariant splitting: residual {residual:e} at n = {n}")]
    NotHyperbolic { n: usize, residual: f64 },

    #[error("splitting is degenerate: minimal angle {0:e}")]
    DegenerateSplitting(f64),

    #[error("no affine piece with acceleration {0} was found")]
    WrongStratum(i64),

    #[error("Lyapunov exponent {0:e} is below the resolution threshold")]
    Inconclusive(f64),

    #[error("duplicate Fourier mode {0}")]
    DuplicateMode(i64),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

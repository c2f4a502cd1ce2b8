use core::fmt;

/// Errors reported by the solver and kernel routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix or vector was constructed from non-finite data.
    NonFinite,
    /// Operand shapes are incompatible.
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// The iterative SVD kernel did not converge within its sweep budget.
    SvdNoConvergence { rows: usize, cols: usize },
    /// `ulp` is undefined for NaN or infinite arguments.
    UlpNonFinite,
    /// The triangular factor of the Hessenberg matrix has an exactly zero
    /// diagonal entry; the pseudoinverse strategy handles this case.
    RankDeficientHessenberg { col: usize },
    /// A NaN appeared in the GMRES recurrence.
    NanAtIteration { iter: usize },
    /// The right-hand-side generator was given a matrix with `Ae = 0`.
    DegenerateRhs,
    /// A bound evaluation was given a non-positive smallest singular value.
    NonPositiveSigma,
    /// A parameter violated its documented range.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite => write!(f, "non-finite entry in input data"),
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::SvdNoConvergence { rows, cols } => {
                write!(f, "SVD did not converge for a {rows}x{cols} matrix")
            }
            Error::UlpNonFinite => write!(f, "ulp of a NaN or infinite value"),
            Error::RankDeficientHessenberg { col } => write!(
                f,
                "zero diagonal in triangularized Hessenberg column {col}; \
                 use the truncated-pseudoinverse strategy for rank-deficient systems"
            ),
            Error::NanAtIteration { iter } => {
                write!(f, "NaN encountered in GMRES recurrence at iteration {iter}")
            }
            Error::DegenerateRhs => write!(f, "degenerate right-hand side: A * ones = 0"),
            Error::NonPositiveSigma => write!(f, "smallest singular value must be positive"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

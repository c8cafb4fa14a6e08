//! Error type shared by every module of the crate.

use core::fmt;

/// Everything that can go wrong in chart and factorization land.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix shapes are incompatible with the requested operation.
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A matrix that must have full (column) rank does not.
    RankDeficient { required: usize, found: usize },
    /// The input has the right shape but wrong numerical rank for the manifold.
    RankMismatch { required: usize, found: usize },
    /// The point lies outside the domain of the chart being applied.
    OutOfChartDomain {
        /// sigma_min / sigma_max of the membership test matrix.
        ratio: f64,
    },
    /// A factor that must be invertible is numerically singular.
    SingularFactor {
        /// sigma_min / sigma_max of the offending factor.
        ratio: f64,
    },
    /// A matrix entry was NaN or infinite.
    NonFiniteEntry { row: usize, col: usize },
    /// Backtracking exhausted its budget without sufficient decrease.
    LineSearchFailed { backtracks: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::RankDeficient { required, found } => {
                write!(f, "rank deficient: required rank {required}, found {found}")
            }
            Error::RankMismatch { required, found } => {
                write!(f, "rank mismatch: required rank {required}, found {found}")
            }
            Error::OutOfChartDomain { ratio } => {
                write!(f, "point outside chart domain (membership ratio {ratio:.3e})")
            }
            Error::SingularFactor { ratio } => {
                write!(f, "singular factor (sigma ratio {ratio:.3e})")
            }
            Error::NonFiniteEntry { row, col } => {
                write!(f, "non-finite entry at ({row}, {col})")
            }
            Error::LineSearchFailed { backtracks } => {
                write!(f, "line search failed after {backtracks} backtracks")
            }
        }
    }
}

impl core::error::Error for Error {}

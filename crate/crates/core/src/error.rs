use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("matrix data has {got} entries, expected {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },
    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate witness")]
    DegenerateWitness,
    #[error("unknown distribution `{0}` (expected gaussian-real, gaussian-complex or sign)")]
    UnknownDistribution(String),
    #[error("grid of {grid} points aliases a polynomial spanning {span} frequencies")]
    Aliasing { grid: usize, span: usize },
    #[error("quadrature did not converge within {max_grid} cells (last iterates {previous:e}, {last:e})")]
    NoConvergence { max_grid: usize, previous: f64, last: f64 },
    #[error("tail truncation did not converge before T = {0}")]
    TruncationDiverged(f64),
    #[error("negative frequency {0} in an analytic polynomial")]
    NotAnalytic(i64),
    #[error("constant term outside Besov decomposition")]
    ConstantTerm,
    #[error("support [{min}, {max}] lies outside the dyadic band [{lo}, {hi}]")]
    OutsideBand { min: i64, max: i64, lo: i64, hi: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Checks `p` is a finite positive exponent.
pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("exponent p = {p} must be a finite positive real")))
    }
}

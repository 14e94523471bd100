use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("diagonal entry {index} is not strictly positive ({value})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("matrix is not positive definite: Cholesky pivot {pivot} = {value:e} (threshold {threshold:e}){}", fmt_note(.note))]
    NotPositiveDefinite {
        pivot: usize,
        value: f64,
        threshold: f64,
        note: Option<String>,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("non-finite input value at index {index}")]
    NonFiniteInput { index: usize },

    #[error("symbol is not strictly positive (min grid value {min:e})")]
    NonPositiveSymbol { min: f64 },

    #[error("log-symbol series has not converged at this resolution (tail estimate {tail:e})")]
    NonConvergent { tail: f64 },

    #[error("exponent p = {p} violates p >= 2 p(X) with p(X) = {p_x}")]
    ConditionViolated { p: f64, p_x: f64 },

    #[error("optimizer did not converge (residual {residual:e}, best log value {best_log})")]
    NonConverged { residual: f64, best_log: f64 },
}

fn fmt_note(note: &Option<String>) -> String {
    match note {
        Some(n) => format!("; {n}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach context to a positive-definiteness failure. Other variants pass through.
    pub fn with_note(self, extra: impl Into<String>) -> Self {
        match self {
            Error::NotPositiveDefinite {
                pivot,
                value,
                threshold,
                note,
            } => {
                let extra = extra.into();
                let note = match note {
                    Some(n) => format!("{n}; {extra}"),
                    None => extra,
                };
                Error::NotPositiveDefinite {
                    pivot,
                    value,
                    threshold,
                    note: Some(note),
                }
            }
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QetError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no sign change on bracket [{lo}, {hi}] (f_lo = {f_lo:e}, f_hi = {f_hi:e})")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("numerical failure in {what}: residual {residual:e}")]
    Numerical { what: &'static str, residual: f64 },
}

pub type Result<T> = std::result::Result<T, QetError>;

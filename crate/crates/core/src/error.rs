use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("degenerate balance: {0}")]
    DegenerateBalance(String),
    #[error("sign error: {0}")]
    SignError(String),
    #[error("tie p1 = p2 = {0}: the profile selector is undefined at an exact tie")]
    TieUnresolved(f64),
    #[error("no dead core fits: R = {radius} <= T = {thickness}")]
    NoDeadCore { radius: f64, thickness: f64 },
    #[error("gradient vanished at s = {0} while the forcing is positive")]
    DegenerateGradient(f64),
    #[error("solution blew up at s = {0}")]
    Overflow(f64),
    #[error("invalid bracket [{lo}, {hi}]: {reason}")]
    BracketError { lo: f64, hi: f64, reason: String },
    #[error("not converged after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

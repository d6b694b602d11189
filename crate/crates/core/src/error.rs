use thiserror::Error;

use crate::dynamics::ConservedSeries;
use crate::picard::IterationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The requested sum or integral does not converge for these exponents.
    #[error("divergent input: {0}")]
    Divergent(String),

    /// Parameters lie outside the region where the bound is claimed.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("blow-up detected at t = {time}")]
    BlowUp {
        time: f64,
        partial: Box<ConservedSeries>,
    },

    #[error("no contraction: distance grew for 3 consecutive iterates")]
    NoContraction { report: Box<IterationReport> },
}

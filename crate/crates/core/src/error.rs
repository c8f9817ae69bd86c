use thiserror::Error;

/// Errors raised by the distribution, series and difference routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {param} = {value} violates {bound}")]
    Domain {
        param: &'static str,
        value: f64,
        bound: &'static str,
    },

    /// A series did not reach its tail-bound tolerance before the term cap.
    #[error(
        "truncation failure: {terms} terms summed (partial value {partial}), \
         tail bound {tail_bound:e} above tolerance {tolerance:e}"
    )]
    Truncation {
        terms: u64,
        partial: f64,
        tail_bound: f64,
        tolerance: f64,
    },

    /// Predicted cancellation in an alternating sum exceeds the supported ratio.
    #[error(
        "cancellation cap exceeded: intermediate magnitude {magnitude:e} is more than \
         {cap:e} times the expected result {expected:e}"
    )]
    Cancellation {
        magnitude: f64,
        expected: f64,
        cap: f64,
    },

    /// An exact-arithmetic size cap was exceeded.
    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    /// The root finder ran out of iterations.
    #[error("root finder did not converge after {iterations} iterations (last x = {last_x})")]
    NonConvergence { iterations: u32, last_x: f64 },

    /// A root bracket without a certified sign change.
    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi} do not change sign")]
    InvalidBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(param: &'static str, value: f64, bound: &'static str) -> Self {
        Error::Domain {
            param,
            value,
            bound,
        }
    }
}

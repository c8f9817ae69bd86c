//! Shared numeric substrate.

mod compensated;
pub mod dd;
mod factorial;
mod roots;
pub mod tail;

pub use compensated::{compensated_sum, CompensatedAccumulator};
pub use dd::DoubleDouble;
pub(crate) use factorial::ln_stirling_dd;
pub use factorial::{log_factorial, log_factorial_dd, stirling_approx, StirlingApprox};
pub use roots::{find_root, RootBracket, MAX_ITERATIONS};
pub use tail::GeometricTail;

/// Distance in units in the last place between two finite values of the
/// same sign. Returns `u64::MAX` when the signs differ.
pub fn ulps_between(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    if a.is_sign_negative() != b.is_sign_negative() || !a.is_finite() || !b.is_finite() {
        return u64::MAX;
    }
    a.abs().to_bits().abs_diff(b.abs().to_bits())
}

/// `exp(x.hi + x.lo)` rounded to `f64`, using `exp(lo) ≈ 1 + lo`.
#[inline]
pub(crate) fn exp_dd_to_f64(x: DoubleDouble) -> f64 {
    let e = x.hi.exp();
    e.mul_add(x.lo, e)
}

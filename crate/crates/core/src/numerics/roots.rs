//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Hard cap on iterations. Bisection alone shrinks any unit bracket to
/// adjacent floats in well under 100 steps.
pub const MAX_ITERATIONS: u32 = 200;

/// An interval with a certified sign change of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

impl RootBracket {
    /// Evaluates `f` at both ends and checks `f(lo) * f(hi) < 0`.
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self> {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let f_lo = f(lo);
        let f_hi = f(hi);
        if !(lo.is_finite() && hi.is_finite()) || !(f_lo * f_hi < 0.0) {
            return Err(Error::InvalidBracket { lo, hi, f_lo, f_hi });
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn f_lo(&self) -> f64 {
        self.f_lo
    }

    pub fn f_hi(&self) -> f64 {
        self.f_hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Finds a root of `f` inside `bracket`.
///
/// Regula falsi with the Illinois weighting, falling back to bisection
/// whenever the interpolated point leaves the bracket or the bracket fails to
/// halve over three steps. The iterate always stays bracketed.
///
/// Stops when `|f(x)| <= tolerance`, when the bracket is narrower than
/// `tolerance`, or when it has collapsed to adjacent floats; in the last two
/// cases the endpoint with the smaller residual is returned. `f` must be
/// continuous and deterministic on the bracket.
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: RootBracket, tolerance: f64) -> Result<f64> {
    let RootBracket {
        mut lo,
        mut hi,
        mut f_lo,
        mut f_hi,
    } = bracket;
    if f_lo.abs() <= tolerance {
        return Ok(lo);
    }
    if f_hi.abs() <= tolerance {
        return Ok(hi);
    }
    // Which side was retained on the previous step: -1 lo, +1 hi.
    let mut last_kept = 0i8;
    let mut width_checkpoint = hi - lo;
    let mut since_checkpoint = 0;

    for _ in 0..MAX_ITERATIONS {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi || hi - lo <= tolerance {
            return Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi });
        }

        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        since_checkpoint += 1;
        let window_closed = since_checkpoint >= 3;
        if window_closed && hi - lo > 0.5 * width_checkpoint {
            x = mid;
        }
        if !(x > lo && x < hi) {
            x = mid;
        }

        let fx = f(x);
        if fx.abs() <= tolerance {
            return Ok(x);
        }
        if (fx < 0.0) == (f_lo < 0.0) {
            lo = x;
            f_lo = fx;
            if last_kept == 1 {
                f_hi *= 0.5;
            }
            last_kept = 1;
        } else {
            hi = x;
            f_hi = fx;
            if last_kept == -1 {
                f_lo *= 0.5;
            }
            last_kept = -1;
        }
        if window_closed {
            width_checkpoint = hi - lo;
            since_checkpoint = 0;
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        last_x: lo + 0.5 * (hi - lo),
    })
}

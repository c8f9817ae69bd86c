//! `log n!` and Stirling's approximation.

use std::sync::OnceLock;

use super::dd::{DoubleDouble, HALF_LN_2PI};

/// Largest `n` served from the cumulative table.
pub const TABLE_MAX: u64 = 1024;

fn table() -> &'static [DoubleDouble] {
    static TABLE: OnceLock<Vec<DoubleDouble>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(TABLE_MAX as usize + 1);
        let mut acc = DoubleDouble::ZERO;
        out.push(acc);
        for k in 1..=TABLE_MAX {
            acc = acc + DoubleDouble::from_f64(k as f64).ln();
            out.push(acc);
        }
        out
    })
}

/// `log n!` in double-double precision.
///
/// Cumulative sum of `log k` for `n <= 1024`, the Stirling series with five
/// correction terms above that (truncation error below `1e-30`).
pub fn log_factorial_dd(n: u64) -> DoubleDouble {
    if n <= TABLE_MAX {
        return table()[n as usize];
    }
    let x = n as f64;
    let ln_x = DoubleDouble::from_f64(x).ln();
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/(12x) - 1/(360x^3) + 1/(1260x^5) - 1/(1680x^7) + 1/(1188x^9);
    // the leading term needs the extra word, the rest is far below it.
    let lead = DoubleDouble::ONE / DoubleDouble::from_f64(12.0 * x);
    let rest =
        -inv * inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0)));
    ln_x.mul_f64(x + 0.5).add_f64(-x) + HALF_LN_2PI + lead.add_f64(rest)
}

/// `log n!`, exactly zero for `n` in `{0, 1}`.
pub fn log_factorial(n: u64) -> f64 {
    log_factorial_dd(n).to_f64()
}

/// Stirling's approximation `n^n e^-n sqrt(2πn)`.
///
/// Returned directly while it fits comfortably in an `f64` (`n <= 170`), as
/// a logarithm beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StirlingApprox {
    Value(f64),
    Ln(f64),
}

impl StirlingApprox {
    pub fn ln(self) -> f64 {
        match self {
            StirlingApprox::Value(v) => v.ln(),
            StirlingApprox::Ln(l) => l,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            StirlingApprox::Value(v) => v,
            StirlingApprox::Ln(l) => l.exp(),
        }
    }
}

/// Log of Stirling's approximation, `n ln n - n + ln(2πn)/2`, in double-double.
pub(crate) fn ln_stirling_dd(n: u64) -> DoubleDouble {
    let x = n as f64;
    let ln_x = DoubleDouble::from_f64(x).ln();
    ln_x.mul_f64(x + 0.5).add_f64(-x) + HALF_LN_2PI
}

/// Stirling's approximation to `n!`; `n` must be at least 1.
pub fn stirling_approx(n: u64) -> StirlingApprox {
    assert!(n >= 1, "stirling_approx requires n >= 1");
    let ln = ln_stirling_dd(n);
    if n <= 170 {
        StirlingApprox::Value(ln.exp().to_f64())
    } else {
        StirlingApprox::Ln(ln.to_f64())
    }
}

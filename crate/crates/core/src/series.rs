//! The series `S(θ, λ) = Σ_n (θ + λn)^n e^(-θ - λn) / n!`, its closed form
//! `1/(1 - λ)` on `-λ₀ < λ < 1`, the column-order double sum obtained by
//! expanding the exponential, the constant `λ₀`, the root-test classifier and
//! the telescoping normalization check `Σ P_n = S(θ, λ) - λ S(θ + λ, λ)`.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::dist::{truncated_moment, GpdParams, TruncationPolicy, DEFAULT_MAX_TERMS};
use crate::error::{Error, Result};
use crate::euler::difference_extended;
use crate::numerics::{
    exp_dd_to_f64, find_root, ln_stirling_dd, log_factorial_dd, ulps_between,
    CompensatedAccumulator, DoubleDouble, GeometricTail, RootBracket,
};
use crate::report::VerificationReport;

/// `λ₀` to the ten digits in which it is usually quoted.
pub const LAMBDA0_PRINTED: f64 = 0.2784645428;

/// `s_series` refuses `λ` within this distance of `-λ₀` or `1`.
pub const ENDPOINT_MARGIN: f64 = 1e-6;

/// Largest ratio of predicted intermediate magnitude to expected result that
/// `s_by_rearrangement` accepts.
pub const CANCELLATION_CAP: f64 = 1e12;

/// Largest column index supported by the rearranged sum.
pub const MAX_REARRANGEMENT_ORDER: u32 = 64;

/// Classifications within this many ulps of a threshold are `Boundary`.
pub const BOUNDARY_ULPS: u64 = 4;

/// A truncated infinite sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: u64,
    /// Bound on the omitted part of the series.
    pub tail_bound: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ConvergenceClass {
    AbsolutelyConvergent,
    Convergent,
    Divergent,
    Boundary,
}

impl fmt::Display for ConvergenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConvergenceClass::AbsolutelyConvergent => "AbsolutelyConvergent",
            ConvergenceClass::Convergent => "Convergent",
            ConvergenceClass::Divergent => "Divergent",
            ConvergenceClass::Boundary => "Boundary",
        };
        f.write_str(s)
    }
}

/// Positive root of `λ e^λ = e^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lambda0 {
    pub value: f64,
    /// `value · e^value - e^-1` evaluated at `value`.
    pub residual: f64,
}

fn lambda0_equation(x: f64) -> f64 {
    x * x.exp() - (-1f64).exp()
}

/// Solves `λ e^λ = e^-1` on `[0.2, 0.3]`, where the left side is increasing.
///
/// The root is always refined to a residual of at most `1e-15`; `tolerance`
/// (at least `1e-15`) is the largest residual the caller accepts.
pub fn lambda0(tolerance: f64) -> Result<Lambda0> {
    if !(tolerance >= 1e-15) {
        return Err(Error::domain("tolerance", tolerance, "tolerance >= 1e-15"));
    }
    let bracket = RootBracket::new(lambda0_equation, 0.2, 0.3)?;
    let value = find_root(lambda0_equation, bracket, 1e-15)?;
    Ok(Lambda0 {
        value,
        residual: lambda0_equation(value),
    })
}

/// Cached `λ₀`.
pub fn lambda0_value() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| lambda0(1e-15).expect("fixed bracket is valid").value)
}

/// `|λ| e^(1+|λ|)`, the n-th root limit of the absolute double series.
pub fn root_test_value(lambda: f64) -> f64 {
    let a = lambda.abs();
    a * (1.0 + a).exp()
}

/// `(|θ + λn|^n e^|θ + λn| / n!)^(1/n)` with `n!` replaced by Stirling's
/// approximation; tends to [`root_test_value`] as `n` grows.
pub fn root_test_nth_root(theta: f64, lambda: f64, n: u64) -> f64 {
    assert!(n >= 1, "root test needs n >= 1");
    let a = DoubleDouble::from_product(n as f64, lambda)
        .add_f64(theta)
        .abs();
    let ln = a.ln().mul_f64(n as f64) + a - ln_stirling_dd(n);
    (ln.to_f64() / n as f64).exp()
}

/// Strongest convergence statement for the series at `λ`.
///
/// Absolute convergence holds for `|λ| < λ₀`; plain convergence for
/// `-λ₀ < λ < 1`, the interval on which `|λ e^-λ| < e^-1` with `λ < 1`.
/// Thresholds are compared in `λ` itself: `λ e^-λ` is flat at `λ = 1`, so
/// testing it against `e^-1` in floating point cannot resolve that end.
pub fn classify_convergence(lambda: f64) -> ConvergenceClass {
    if lambda.is_nan() {
        return ConvergenceClass::Divergent;
    }
    let l0 = lambda0_value();
    if ulps_between(lambda.abs(), l0) <= BOUNDARY_ULPS || ulps_between(lambda, 1.0) <= BOUNDARY_ULPS
    {
        return ConvergenceClass::Boundary;
    }
    if lambda.abs() < l0 {
        ConvergenceClass::AbsolutelyConvergent
    } else if lambda > -l0 && lambda < 1.0 {
        ConvergenceClass::Convergent
    } else {
        ConvergenceClass::Divergent
    }
}

/// `1/(1 - λ)`.
pub fn s_closed_form(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda >= 1.0 {
        return Err(Error::domain("lambda", lambda, "lambda < 1"));
    }
    Ok(1.0 / (1.0 - lambda))
}

/// `ln |T_n|` and the sign of `T_n = (θ + λn)^n e^(-θ-λn) / n!`.
fn series_log_term(theta: f64, lambda: f64, n: u64) -> (DoubleDouble, bool) {
    if n == 0 {
        return (DoubleDouble::from_f64(-theta), false);
    }
    let base = DoubleDouble::from_product(n as f64, lambda).add_f64(theta);
    if base.hi == 0.0 {
        return (DoubleDouble::from_f64(f64::NEG_INFINITY), false);
    }
    let negative = base.is_sign_negative() && n % 2 == 1;
    let ln = base.abs().ln().mul_f64(n as f64) - base - log_factorial_dd(n);
    (ln, negative)
}

/// Direct summation of `S(θ, λ)` until the certified tail bound is at most
/// `tolerance`.
///
/// Accepts `-λ₀ + 1e-6 < λ < 1 - 1e-6`; terms change sign past
/// `n = θ/|λ|` when `λ < 0`.
pub fn s_series(theta: f64, lambda: f64, tolerance: f64) -> Result<SeriesResult> {
    s_series_capped(theta, lambda, tolerance, DEFAULT_MAX_TERMS)
}

pub fn s_series_capped(
    theta: f64,
    lambda: f64,
    tolerance: f64,
    max_terms: u64,
) -> Result<SeriesResult> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::domain("theta", theta, "theta > 0 (finite)"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::domain("tolerance", tolerance, "tolerance > 0"));
    }
    if !lambda.is_finite() || lambda <= -lambda0_value() + ENDPOINT_MARGIN {
        return Err(Error::domain("lambda", lambda, "lambda > -lambda0 + 1e-6"));
    }
    if lambda >= 1.0 - ENDPOINT_MARGIN {
        return Err(Error::domain("lambda", lambda, "lambda < 1 - 1e-6"));
    }

    let limit = lambda.abs() * (1.0 - lambda).exp();
    let min_index = if lambda < 0.0 {
        // Past the sign change the ratios settle down.
        (2.0 * theta / -lambda).ceil() as u64 + 3
    } else {
        4
    };
    let mut tail = GeometricTail::new(limit, min_index);
    let mut acc = CompensatedAccumulator::new();
    let mut last_bound = f64::INFINITY;
    for n in 0..max_terms {
        let (ln, negative) = series_log_term(theta, lambda, n);
        let magnitude = if ln.hi == f64::NEG_INFINITY {
            0.0
        } else if n == 0 {
            (-theta).exp()
        } else {
            exp_dd_to_f64(ln)
        };
        acc.add(if negative { -magnitude } else { magnitude });
        let ln_abs = if magnitude > 0.0 {
            ln.to_f64()
        } else {
            f64::NEG_INFINITY
        };
        if let Some(bound) = tail.observe(n, ln_abs) {
            last_bound = bound;
            if bound <= tolerance {
                return Ok(SeriesResult {
                    value: acc.value(),
                    terms_used: n + 1,
                    tail_bound: bound,
                    converged: true,
                });
            }
        }
    }
    Err(Error::Truncation {
        terms: max_terms,
        partial: acc.value(),
        tail_bound: last_bound,
        tolerance,
    })
}

/// `Σ_{n=0}^{k} C(k, n) |θ + λn|^k`, the largest cancellation the k-th inner
/// sum has to survive.
fn inner_magnitude(theta: f64, lambda: f64, k: u32) -> f64 {
    let mut binom = 1.0f64;
    let mut total = 0.0;
    for n in 0..=k {
        total += binom * (theta + lambda * n as f64).abs().powi(k as i32);
        binom = binom * (k - n) as f64 / (n + 1) as f64;
    }
    total
}

/// `S(θ, λ)` summed in column order,
/// `Σ_k (1/k!) Σ_{n<=k} (-1)^(k-n) C(k, n) (θ + λn)^k`, for `k <= k_max`.
///
/// Each inner alternating sum is evaluated in double-double; it equals
/// `λ^k k!` but its terms grow like `(θ + λk)^k`, so the call is refused when
/// `max_k (Σ_n C(k,n)|θ+λn|^k) / k!` exceeds `1e12 / (1 - λ)`. The reported
/// tail bound is `|λ|^(k_max+1) / (1 - |λ|)` plus a rounding allowance.
pub fn s_by_rearrangement(theta: f64, lambda: f64, k_max: u32) -> Result<SeriesResult> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::domain("theta", theta, "theta > 0 (finite)"));
    }
    if !lambda.is_finite() || lambda.abs() >= lambda0_value() {
        return Err(Error::domain("lambda", lambda, "|lambda| < lambda0"));
    }
    if k_max == 0 {
        return Err(Error::domain("k_max", 0.0, "k_max >= 1"));
    }
    if k_max > MAX_REARRANGEMENT_ORDER {
        return Err(Error::CapExceeded {
            what: "k_max",
            value: k_max as u64,
            cap: MAX_REARRANGEMENT_ORDER as u64,
        });
    }

    let expected = 1.0 / (1.0 - lambda);
    let mut factorial = 1.0f64;
    let mut scaled = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        if k > 0 {
            factorial *= k as f64;
        }
        scaled.push(inner_magnitude(theta, lambda, k) / factorial);
    }
    let worst = scaled.iter().copied().fold(0.0, f64::max);
    if worst > CANCELLATION_CAP * expected {
        return Err(Error::Cancellation {
            magnitude: worst,
            expected,
            cap: CANCELLATION_CAP,
        });
    }

    let mut outer = DoubleDouble::ZERO;
    let mut factorial = DoubleDouble::ONE;
    for k in 0..=k_max {
        if k > 0 {
            factorial = factorial.mul_f64(k as f64);
        }
        let inner = difference_extended(theta, lambda, k, k);
        outer = outer + inner / factorial;
    }

    let a = lambda.abs();
    let truncation = a.powi(k_max as i32 + 1) / (1.0 - a);
    // Double-double terms carry relative error of order (k + 2) 2^-104.
    let rounding: f64 = scaled
        .iter()
        .enumerate()
        .map(|(k, m)| m * (k as f64 + 2.0) * 4.0 * 2f64.powi(-104))
        .sum::<f64>()
        + f64::EPSILON * expected;
    Ok(SeriesResult {
        value: outer.to_f64(),
        terms_used: k_max as u64 + 1,
        tail_bound: truncation + rounding,
        converged: true,
    })
}

/// Checks `Σ P_n = S(θ, λ) - λ S(θ + λ, λ) = 1` three ways: the distribution's
/// own truncated sum, the two series, and the closed form `(1-λ)/(1-λ)`.
/// The residual is the largest pairwise disagreement.
pub fn telescoping_check(params: &GpdParams, tolerance: f64) -> Result<VerificationReport> {
    if !(tolerance > 0.0) {
        return Err(Error::domain("tolerance", tolerance, "tolerance > 0"));
    }
    let (theta, lambda) = (params.theta(), params.lambda());
    let inner_tol = (tolerance * 1e-2).max(f64::MIN_POSITIVE);

    let mass = truncated_moment(params, 0, &TruncationPolicy::with_tolerance(inner_tol)?)?;
    let s = s_series(theta, lambda, inner_tol)?;
    let s_shift = s_series(theta + lambda, lambda, inner_tol)?;
    let telescoped = s.value - lambda * s_shift.value;
    // 1/(1 - λ) - λ/(1 - λ)
    let closed = s_closed_form(lambda)? * (1.0 - lambda);

    let residual = (mass.value - telescoped)
        .abs()
        .max((mass.value - closed).abs())
        .max((telescoped - closed).abs());
    Ok(VerificationReport::new(
        "telescoping",
        "sum P_n = S(theta, lambda) - lambda S(theta + lambda, lambda) = 1",
        residual,
        tolerance,
    )
    .with_input("theta", theta)
    .with_input("lambda", lambda)
    .with_detail(format!(
        "sum P_n = {:.17}, S - lambda S' = {:.17} (S = {:.17}, S' = {:.17})",
        mass.value, telescoped, s.value, s_shift.value
    )))
}

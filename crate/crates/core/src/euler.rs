//! k-th forward differences of powers of an affine function,
//! `Σ_{n=0}^{k} (-1)^(k-n) C(k, n) (A + Bn)^p`.
//!
//! The sum vanishes for `p < k` and equals `B^k k!` for `p = k`. Three
//! evaluation paths are provided: exact rationals, `f64` with compensated
//! accumulation, and double-double (used by the rearranged series).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::DoubleDouble;
use crate::report::VerificationReport;

/// Cap on `p` and `k` for every evaluation path.
pub const MAX_ORDER: u32 = 64;

/// Cap on `max_order` for the exhaustive sweep in [`verify_gould`].
pub const MAX_SWEEP_ORDER: u32 = 20;

/// An exact rational in lowest terms with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactValue(BigRational);

impl ExactValue {
    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for ExactValue {
    fn from(r: BigRational) -> Self {
        // `Ratio::new` reduces and normalises the sign; be explicit anyway.
        ExactValue(BigRational::new(r.numer().clone(), r.denom().clone()))
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parses `"3"`, `"-1/2"` or a terminating decimal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::domain("rational", f64::NAN, "integer, p/q or terminating decimal");
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let mut n = BigInt::from_str(&digits).map_err(|_| bad())?;
        if negative {
            n = -n;
        }
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(n, d));
    }
    BigInt::from_str(s)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

/// A difference-of-powers evaluation request.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceQuery {
    a: BigRational,
    b: BigRational,
    p: u32,
    k: u32,
}

impl DifferenceQuery {
    pub fn new(a: BigRational, b: BigRational, p: u32, k: u32) -> Result<Self> {
        check_caps(p, k)?;
        Ok(Self { a, b, p, k })
    }

    /// Convenience constructor for integer `A` and `B`.
    pub fn integers(a: i64, b: i64, p: u32, k: u32) -> Result<Self> {
        Self::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
            p,
            k,
        )
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

fn check_caps(p: u32, k: u32) -> Result<()> {
    if p > MAX_ORDER {
        return Err(Error::CapExceeded {
            what: "p",
            value: p as u64,
            cap: MAX_ORDER as u64,
        });
    }
    if k > MAX_ORDER {
        return Err(Error::CapExceeded {
            what: "k",
            value: k as u64,
            cap: MAX_ORDER as u64,
        });
    }
    Ok(())
}

/// Binomial coefficients `C(k, 0..=k)` by the multiplicative recurrence.
pub fn binomial_row(k: u32) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(k as usize + 1);
    let mut c = BigInt::one();
    for n in 0..=k {
        row.push(c.clone());
        // C(k, n+1) = C(k, n) (k - n) / (n + 1), exact at every step.
        c = c * BigInt::from(k - n) / BigInt::from(n + 1);
    }
    row
}

/// `C(k, n)` for `k <= 64`; the intermediate product fits in `u128`.
fn binomial_u128(k: u32, n: u32) -> u128 {
    let n = n.min(k - n);
    let mut c: u128 = 1;
    for i in 0..n {
        c = c * (k - i) as u128 / (i + 1) as u128;
    }
    c
}

/// The alternating sum in exact rational arithmetic.
pub fn difference_exact(query: &DifferenceQuery) -> ExactValue {
    let mut total = BigRational::zero();
    for (n, c) in binomial_row(query.k).into_iter().enumerate() {
        let x = &query.a + &query.b * BigRational::from_integer(BigInt::from(n));
        let term = BigRational::from_integer(c) * Pow::pow(x, query.p);
        if (query.k as usize - n).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    ExactValue::from(total)
}

/// The same sum rounded to `f64`.
///
/// Terms and their running total are carried in double-double, so the
/// absolute error is about `ε²` times the largest term `C(k, n) |A + Bn|^p`.
/// That still swamps the result once `k` is large.
pub fn difference_float(a: f64, b: f64, p: u32, k: u32) -> Result<f64> {
    check_caps(p, k)?;
    Ok(difference_extended(a, b, p, k).to_f64())
}

/// The same sum in double-double arithmetic. `A + Bn` and the binomial
/// coefficients are represented exactly; `p, k <= 64` is assumed.
pub fn difference_extended(a: f64, b: f64, p: u32, k: u32) -> DoubleDouble {
    debug_assert!(p <= MAX_ORDER && k <= MAX_ORDER);
    let mut total = DoubleDouble::ZERO;
    for n in 0..=k {
        let x = DoubleDouble::from_product(b, n as f64).add_f64(a);
        let term = DoubleDouble::from_u128(binomial_u128(k, n)) * x.powi(p);
        total = if (k - n).is_multiple_of(2) {
            total + term
        } else {
            total - term
        };
    }
    total
}

/// Checks the vanishing and leading-coefficient cases over every
/// `(A, B)` pair and every `0 <= p <= k <= max_order`.
///
/// A mismatch is reported in the returned report, not as an error; the
/// residual is the magnitude of the first discrepancy.
pub fn verify_gould(
    a_values: &[BigRational],
    b_values: &[BigRational],
    max_order: u32,
) -> Result<VerificationReport> {
    if max_order > MAX_SWEEP_ORDER {
        return Err(Error::CapExceeded {
            what: "max_order",
            value: max_order as u64,
            cap: MAX_SWEEP_ORDER as u64,
        });
    }
    let formula = "sum_n (-1)^(k-n) C(k,n) (A + B n)^p = 0 for p < k, B^k k! for p = k";
    let mut factorial = BigInt::one();
    let mut cases = 0u64;
    for k in 0..=max_order {
        if k > 0 {
            factorial *= BigInt::from(k);
        }
        for b in b_values {
            let leading = Pow::pow(b.clone(), k) * BigRational::from_integer(factorial.clone());
            for a in a_values {
                for p in 0..=k {
                    let query = DifferenceQuery::new(a.clone(), b.clone(), p, k)?;
                    let got = difference_exact(&query);
                    let expected = if p < k {
                        BigRational::zero()
                    } else {
                        leading.clone()
                    };
                    cases += 1;
                    if got.as_rational() != &expected {
                        let diff = (got.as_rational() - &expected).abs();
                        return Ok(VerificationReport::new(
                            "euler-difference",
                            formula,
                            diff.to_f64().unwrap_or(f64::INFINITY),
                            0.0,
                        )
                        .with_input("max_order", max_order as f64)
                        .with_detail(format!(
                            "counterexample A={a} B={b} p={p} k={k}: got {got}, expected {expected}"
                        )));
                    }
                }
            }
        }
    }
    Ok(
        VerificationReport::new("euler-difference", formula, 0.0, 0.0)
            .with_input("max_order", max_order as f64)
            .with_input("cases", cases as f64),
    )
}

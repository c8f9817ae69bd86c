//! The generalized Poisson distribution
//! `P_n(θ, λ) = θ (θ + nλ)^(n-1) e^(-θ - nλ) / n!` on the non-negative
//! integers, together with numerical certificates for the identities behind
//! its normalization:
//!
//! * the series `S(θ, λ) = Σ (θ + λn)^n e^(-θ - λn) / n! = 1/(1 - λ)` for
//!   `-λ₀ < λ < 1` ([`series`]),
//! * the vanishing/leading-coefficient rule for k-th differences of powers
//!   ([`euler`]),
//! * the convergence constant `λ₀`, root of `λ e^λ = e^-1`, and
//! * the telescoping form `Σ P_n = S(θ, λ) - λ S(θ + λ, λ) = 1`.

// Negated comparisons are how NaN gets rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dist;
pub mod error;
pub mod euler;
pub mod numerics;
pub mod report;
pub mod series;

pub use dist::{GpdParams, PmfTerm, TruncationPolicy};
pub use error::{Error, Result};
pub use report::VerificationReport;
pub use series::SeriesResult;

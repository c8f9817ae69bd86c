//! The one-shot verification suite behind `gpd verify`.

use num_rational::BigRational;

use crate::dist::{truncated_moment, GpdParams, TruncationPolicy};
use crate::euler::{parse_rational, verify_gould};
use crate::numerics::ulps_between;
use crate::report::VerificationReport;
use crate::series::{
    classify_convergence, lambda0, lambda0_value, root_test_nth_root, root_test_value,
    s_by_rearrangement, s_closed_form, s_series, telescoping_check, ConvergenceClass,
    BOUNDARY_ULPS, LAMBDA0_PRINTED, MAX_REARRANGEMENT_ORDER,
};

pub const DEFAULT_THETAS: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
pub const DEFAULT_LAMBDAS: [f64; 10] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Negative dispersion values exercised by the series checks only.
pub const SERIES_EXTRA_LAMBDAS: [f64; 2] = [-0.25, -0.1];
/// From this λ upward, tolerances are multiplied by [`HIGH_LAMBDA_FACTOR`].
pub const HIGH_LAMBDA: f64 = 0.9;
pub const HIGH_LAMBDA_FACTOR: f64 = 100.0;
/// Index at which the Stirling form of the root test is evaluated.
pub const ROOT_TEST_INDEX: u64 = 100_000_000_000_000;
pub const CLASSIFIER_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub thetas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            thetas: DEFAULT_THETAS.to_vec(),
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            tolerance: 1e-10,
        }
    }
}

impl VerifyConfig {
    /// Tolerance in force at `lambda`.
    pub fn tolerance_at(&self, lambda: f64) -> f64 {
        if lambda >= HIGH_LAMBDA {
            self.tolerance * HIGH_LAMBDA_FACTOR
        } else {
            self.tolerance
        }
    }

    fn series_lambdas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.lambdas.clone();
        out.extend(SERIES_EXTRA_LAMBDAS);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

fn failed(identity: &str, formula: &str, tolerance: f64, err: impl ToString) -> VerificationReport {
    VerificationReport::new(identity, formula, f64::INFINITY, tolerance)
        .with_detail(err.to_string())
}

/// Runs every check; reports are ordered by identity, then grid key.
pub fn run_suite(config: &VerifyConfig) -> Vec<VerificationReport> {
    let mut reports = Vec::new();
    reports.extend(normalization(config));
    reports.extend(series_closed_form(config));
    reports.extend(theta_independence(config));
    reports.extend(rearrangement(config));
    reports.push(gould());
    reports.extend(lambda0_checks(config));
    reports.extend(root_test(config));
    reports.push(classifier());
    reports.extend(telescoping(config));
    reports
}

fn dist_grid(config: &VerifyConfig) -> Vec<GpdParams> {
    let mut grid = Vec::new();
    for &theta in &config.thetas {
        for &lambda in &config.lambdas {
            if let Ok(p) = GpdParams::new(theta, lambda) {
                grid.push(p);
            }
        }
    }
    grid
}

fn normalization(config: &VerifyConfig) -> Vec<VerificationReport> {
    const F: &str = "sum_n P_n(theta, lambda) = 1";
    dist_grid(config)
        .into_iter()
        .map(|p| {
            let tol = config.tolerance_at(p.lambda());
            let report = TruncationPolicy::with_tolerance(tol * 1e-2)
                .and_then(|policy| truncated_moment(&p, 0, &policy))
                .map(|r| {
                    VerificationReport::new("normalization", F, (r.value - 1.0).abs(), tol)
                        .with_detail(format!(
                            "{} terms, tail bound {:e}",
                            r.terms_used, r.tail_bound
                        ))
                })
                .unwrap_or_else(|e| failed("normalization", F, tol, e));
            report
                .with_input("theta", p.theta())
                .with_input("lambda", p.lambda())
        })
        .collect()
}

fn series_closed_form(config: &VerifyConfig) -> Vec<VerificationReport> {
    const F: &str = "S(theta, lambda) = 1/(1 - lambda)";
    let mut out = Vec::new();
    for &theta in &config.thetas {
        for lambda in config.series_lambdas() {
            let tol = config.tolerance_at(lambda);
            let report = s_series(theta, lambda, tol * 1e-2)
                .and_then(|r| Ok((r, s_closed_form(lambda)?)))
                .map(|(r, closed)| {
                    VerificationReport::new("series-closed-form", F, (r.value - closed).abs(), tol)
                        .with_detail(format!(
                            "{} terms, tail bound {:e}",
                            r.terms_used, r.tail_bound
                        ))
                })
                .unwrap_or_else(|e| failed("series-closed-form", F, tol, e));
            out.push(
                report
                    .with_input("theta", theta)
                    .with_input("lambda", lambda),
            );
        }
    }
    out
}

fn theta_independence(config: &VerifyConfig) -> Vec<VerificationReport> {
    const F: &str = "S(theta1, lambda) = S(theta2, lambda)";
    let mut out = Vec::new();
    for lambda in config.series_lambdas() {
        let tol = config.tolerance_at(lambda);
        let sums: Result<Vec<_>, _> = config
            .thetas
            .iter()
            .map(|&t| s_series(t, lambda, tol * 1e-2))
            .collect();
        let report = match sums {
            Ok(sums) => {
                let lo = sums.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
                let hi = sums
                    .iter()
                    .map(|r| r.value)
                    .fold(f64::NEG_INFINITY, f64::max);
                let tails: f64 = sums.iter().map(|r| r.tail_bound).fold(0.0, f64::max);
                VerificationReport::new("series-theta-independence", F, hi - lo, tol + 2.0 * tails)
            }
            Err(e) => failed("series-theta-independence", F, tol, e),
        };
        out.push(report.with_input("lambda", lambda));
    }
    out
}

/// Smallest column count whose truncation error is below `target`.
fn rearrangement_order(lambda: f64, target: f64) -> u32 {
    let a = lambda.abs();
    (1..=MAX_REARRANGEMENT_ORDER)
        .find(|&k| a.powi(k as i32 + 1) / (1.0 - a) <= target)
        .unwrap_or(MAX_REARRANGEMENT_ORDER)
}

fn rearrangement(config: &VerifyConfig) -> Vec<VerificationReport> {
    const F: &str = "sum_k (1/k!) sum_n (-1)^(k-n) C(k,n) (theta + lambda n)^k = 1/(1 - lambda)";
    let l0 = lambda0_value();
    let mut out = Vec::new();
    for &theta in &config.thetas {
        for lambda in config.series_lambdas().into_iter().filter(|l| l.abs() < l0) {
            let tol = config.tolerance_at(lambda);
            let k_max = rearrangement_order(lambda, tol * 0.1);
            let report = s_by_rearrangement(theta, lambda, k_max)
                .map(|r| {
                    let residual = (r.value - 1.0 / (1.0 - lambda)).abs();
                    VerificationReport::new("rearrangement", F, residual, tol)
                        .with_detail(format!("k_max {k_max}, declared bound {:e}", r.tail_bound))
                })
                .unwrap_or_else(|e| failed("rearrangement", F, tol, e));
            out.push(
                report
                    .with_input("theta", theta)
                    .with_input("lambda", lambda),
            );
        }
    }
    out
}

/// Exhaustive sweep over the rational grid used for acceptance.
pub fn gould_grid() -> (Vec<BigRational>, Vec<BigRational>) {
    let parse = |v: &[&str]| -> Vec<BigRational> {
        v.iter()
            .map(|s| parse_rational(s).expect("literal"))
            .collect()
    };
    (
        parse(&["-2", "-1", "-1/2", "0", "1/2", "1", "2"]),
        parse(&["-2", "-1", "1", "2", "1/3"]),
    )
}

fn gould() -> VerificationReport {
    let (a, b) = gould_grid();
    verify_gould(&a, &b, 12).unwrap_or_else(|e| {
        failed(
            "euler-difference",
            "sum_n (-1)^(k-n) C(k,n) (A + B n)^p = 0 for p < k, B^k k! for p = k",
            0.0,
            e,
        )
    })
}

fn lambda0_checks(config: &VerifyConfig) -> Vec<VerificationReport> {
    let l = match lambda0(1e-15) {
        Ok(l) => l,
        Err(e) => {
            return vec![failed(
                "lambda0",
                "lambda0 e^lambda0 = e^-1",
                config.tolerance,
                e,
            )]
        }
    };
    vec![
        VerificationReport::new(
            "lambda0",
            "lambda0 e^lambda0 = e^-1",
            l.residual.abs(),
            config.tolerance,
        )
        .with_input("lambda0", l.value),
        VerificationReport::new(
            "lambda0-printed",
            "lambda0 = 0.2784645428 (10 digits)",
            (l.value - LAMBDA0_PRINTED).abs(),
            5e-11,
        )
        .with_input("lambda0", l.value),
        VerificationReport::new(
            "root-test-at-lambda0",
            "|lambda0| e^(1 + |lambda0|) = 1",
            (root_test_value(l.value) - 1.0).abs(),
            config.tolerance,
        )
        .with_input("lambda0", l.value),
    ]
}

fn root_test(config: &VerifyConfig) -> Vec<VerificationReport> {
    const F: &str =
        "(|theta + lambda n|^n e^|theta + lambda n| / n!)^(1/n) -> |lambda| e^(1 + |lambda|)";
    let theta = config.thetas.iter().copied().fold(f64::NAN, f64::max);
    config
        .series_lambdas()
        .into_iter()
        .filter(|&l| l != 0.0)
        .map(|lambda| {
            let tol = config.tolerance_at(lambda);
            let approx = root_test_nth_root(theta, lambda, ROOT_TEST_INDEX);
            VerificationReport::new(
                "root-test-stirling",
                F,
                (approx - root_test_value(lambda)).abs(),
                tol,
            )
            .with_input("theta", theta)
            .with_input("lambda", lambda)
            .with_input("n", ROOT_TEST_INDEX as f64)
        })
        .collect()
}

/// `λ_i = -1 + 2.2 i / (points - 1)`.
pub fn classifier_grid(points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| -1.0 + 2.2 * i as f64 / (points - 1) as f64)
}

/// Disagreements between the classifier and the two criteria written out
/// directly; `Boundary` counts as agreement only within 4 ulps of a
/// threshold.
pub fn classifier_disagreements(points: usize) -> Vec<(f64, ConvergenceClass)> {
    let l0 = lambda0_value();
    let e_inv = (-1f64).exp();
    let near = |x: f64| {
        ulps_between(x.abs(), l0) <= BOUNDARY_ULPS || ulps_between(x, 1.0) <= BOUNDARY_ULPS
    };
    classifier_grid(points)
        .filter_map(|lambda| {
            let got = classify_convergence(lambda);
            let expected = if near(lambda) {
                ConvergenceClass::Boundary
            } else if lambda.abs() < l0 {
                ConvergenceClass::AbsolutelyConvergent
            } else if (lambda * (-lambda).exp()).abs() < e_inv && lambda < 1.0 {
                ConvergenceClass::Convergent
            } else {
                ConvergenceClass::Divergent
            };
            let root_test_agrees =
                (root_test_value(lambda) < 1.0) == (lambda.abs() < l0) || near(lambda);
            (got != expected || !root_test_agrees).then_some((lambda, got))
        })
        .collect()
}

fn classifier() -> VerificationReport {
    let bad = classifier_disagreements(CLASSIFIER_POINTS);
    let mut r = VerificationReport::new(
        "convergence-classifier",
        "absolute iff |lambda| < lambda0; convergent iff |lambda e^-lambda| < e^-1 and lambda < 1",
        bad.len() as f64,
        0.0,
    )
    .with_input("points", CLASSIFIER_POINTS as f64);
    if let Some((lambda, class)) = bad.first() {
        r = r.with_detail(format!("first disagreement at lambda = {lambda}: {class}"));
    }
    r
}

fn telescoping(config: &VerifyConfig) -> Vec<VerificationReport> {
    const F: &str = "sum P_n = S(theta, lambda) - lambda S(theta + lambda, lambda) = 1";
    dist_grid(config)
        .into_iter()
        .map(|p| {
            let tol = config.tolerance_at(p.lambda());
            telescoping_check(&p, tol).unwrap_or_else(|e| {
                failed("telescoping", F, tol, e)
                    .with_input("theta", p.theta())
                    .with_input("lambda", p.lambda())
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rearrangement_order_meets_target() {
        let k = rearrangement_order(0.25, 1e-11);
        assert!(0.25f64.powi(k as i32 + 1) / 0.75 <= 1e-11);
        assert!(0.25f64.powi(k as i32) / 0.75 > 1e-11);
        assert_eq!(rearrangement_order(0.0, 1e-11), 1);
    }

    #[test]
    fn classifier_grid_endpoints() {
        let g: Vec<f64> = classifier_grid(1000).collect();
        assert_eq!(g.len(), 1000);
        assert_eq!(g[0], -1.0);
        assert!((g[999] - 1.2).abs() < 1e-15);
    }

    #[test]
    fn high_lambda_tolerance() {
        let c = VerifyConfig::default();
        assert_eq!(c.tolerance_at(0.5), 1e-10);
        assert!((c.tolerance_at(0.95) - 1e-8).abs() < 1e-20);
    }
}

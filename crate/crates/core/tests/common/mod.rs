//! Independent oracles shared by the integration tests.
//!
//! High-precision values come from `astro-float` at 160 bits and never touch
//! the double-double code under test.

#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub const PREC: usize = 160;
const RM: RoundingMode = RoundingMode::ToEven;

pub struct Oracle {
    cc: Consts,
}

impl Oracle {
    pub fn new() -> Self {
        Self {
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn num(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, PREC)
    }

    pub fn int(&self, n: u64) -> BigFloat {
        BigFloat::from_u64(n, PREC)
    }

    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(PREC, RM, &mut self.cc)
    }

    pub fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(PREC, RM, &mut self.cc)
    }

    /// `log n!` by summing `log k`.
    pub fn ln_factorial(&mut self, n: u64) -> BigFloat {
        let mut acc = self.int(0);
        for k in 2..=n {
            let l = self.ln(&self.int(k));
            acc = acc.add(&l, PREC, RM);
        }
        acc
    }

    /// `log n!` from the Stirling series with Bernoulli terms up to `B_20`;
    /// for `n >= 10^4` the omitted terms are below `1e-90`.
    pub fn ln_factorial_stirling(&mut self, n: u64) -> BigFloat {
        // B_2j / (2j (2j - 1)) as exact fractions.
        const COEFFS: [(i64, i64); 10] = [
            (1, 12),
            (-1, 360),
            (1, 1260),
            (-1, 1680),
            (1, 1188),
            (-691, 360360),
            (1, 156),
            (-3617, 122400),
            (43867, 244188),
            (-174611, 125400),
        ];
        let x = self.int(n);
        let ln_x = self.ln(&x);
        let two_pi = self.cc.pi(PREC, RM).mul(&self.num(2.0), PREC, RM);
        let half_ln_2pi = self.ln(&two_pi).div(&self.num(2.0), PREC, RM);
        let mut acc = x
            .add(&self.num(0.5), PREC, RM)
            .mul(&ln_x, PREC, RM)
            .sub(&x, PREC, RM)
            .add(&half_ln_2pi, PREC, RM);
        let x2 = x.mul(&x, PREC, RM);
        let mut power = x.clone();
        for (p, q) in COEFFS {
            let c = BigFloat::from_i64(p, PREC).div(&BigFloat::from_i64(q, PREC), PREC, RM);
            acc = acc.add(&c.div(&power, PREC, RM), PREC, RM);
            power = power.mul(&x2, PREC, RM);
        }
        acc
    }

    /// `log P_n` evaluated directly from the defining formula.
    pub fn log_pmf(&mut self, theta: f64, lambda: f64, n: u64) -> BigFloat {
        let t = self.num(theta);
        if n == 0 {
            return t.neg();
        }
        let base = t.add(&self.int(n).mul(&self.num(lambda), PREC, RM), PREC, RM);
        let ln_t = self.ln(&t);
        let ln_base = self.ln(&base);
        let lf = self.ln_factorial(n);
        ln_t.add(&ln_base.mul(&self.int(n - 1), PREC, RM), PREC, RM)
            .sub(&base, PREC, RM)
            .sub(&lf, PREC, RM)
    }

    pub fn pmf(&mut self, theta: f64, lambda: f64, n: u64) -> BigFloat {
        let l = self.log_pmf(theta, lambda, n);
        self.exp(&l)
    }

    /// `θ^n e^-θ / n!`.
    pub fn poisson(&mut self, theta: f64, n: u64) -> BigFloat {
        let t = self.num(theta);
        let mut term = self.exp(&t.neg());
        for k in 1..=n {
            term = term.mul(&t, PREC, RM).div(&self.int(k), PREC, RM);
        }
        term
    }

    /// The pmf from `n = 0` until a term past the mode falls below `floor`.
    pub fn pmf_table(&mut self, theta: f64, lambda: f64, floor: f64) -> Vec<BigFloat> {
        let t = self.num(theta);
        let l = self.num(lambda);
        let ln_t = self.ln(&t);
        let floor = self.num(floor);
        let mut out = vec![self.exp(&t.neg())];
        let mut lf = self.int(0);
        let mut past_peak = false;
        for n in 1u64.. {
            lf = lf.add(&self.ln(&self.int(n)), PREC, RM);
            let base = t.add(&self.int(n).mul(&l, PREC, RM), PREC, RM);
            let ln_base = self.ln(&base);
            let lp = ln_t
                .add(&ln_base.mul(&self.int(n - 1), PREC, RM), PREC, RM)
                .sub(&base, PREC, RM)
                .sub(&lf, PREC, RM);
            let p = self.exp(&lp);
            past_peak |= p < out[out.len() - 1];
            let small = p < floor;
            out.push(p);
            if past_peak && small {
                break;
            }
        }
        out
    }

    pub fn sum(&self, xs: &[BigFloat]) -> BigFloat {
        xs.iter().fold(self.int(0), |a, x| a.add(x, PREC, RM))
    }

    pub fn weighted_sum(&self, xs: &[BigFloat], power: u32) -> BigFloat {
        xs.iter().enumerate().fold(self.int(0), |a, (n, x)| {
            let w = self.int((n as u64).pow(power));
            a.add(&x.mul(&w, PREC, RM), PREC, RM)
        })
    }
}

/// Nearest `f64` to a high-precision value.
pub fn to_f64(x: &BigFloat) -> f64 {
    let s = format!("{x}");
    s.parse()
        .unwrap_or_else(|_| panic!("unparseable oracle value {s}"))
}

/// `|computed - exact| / |exact|` without rounding the oracle first.
pub fn rel_error(computed: f64, exact: &BigFloat) -> f64 {
    let c = BigFloat::from_f64(computed, PREC);
    let d = c.sub(exact, PREC, RM).div(exact, PREC, RM);
    to_f64(&d).abs()
}

pub fn abs_error(computed: f64, exact: &BigFloat) -> f64 {
    let c = BigFloat::from_f64(computed, PREC);
    to_f64(&c.sub(exact, PREC, RM)).abs()
}

/// Outcome of a chi-square goodness-of-fit test.
#[derive(Debug)]
pub struct ChiSquare {
    pub statistic: f64,
    pub critical: f64,
    pub dof: usize,
    pub covered_mass: f64,
}

impl ChiSquare {
    pub fn passes(&self) -> bool {
        self.statistic <= self.critical
    }
}

/// Chi-square of observed draws against `probs` (`probs[n] = P(X = n)`).
///
/// Bins `0..m` cover at least 99.9% of the mass and each expects at least
/// five counts; everything above lands in one overflow bin.
pub fn chi_square(draws: &[u64], probs: &[f64], alpha: f64) -> ChiSquare {
    let total = draws.len() as f64;
    let mut covered = 0.0;
    let mut bins = 0;
    while bins < probs.len() && (covered < 0.999 || probs[bins] * total >= 5.0) {
        covered += probs[bins];
        bins += 1;
    }
    assert!(covered >= 0.999, "pmf table too short: {covered}");
    let mut observed = vec![0u64; bins + 1];
    for &d in draws {
        observed[(d as usize).min(bins)] += 1;
    }
    let mut expected: Vec<f64> = probs[..bins].iter().map(|p| p * total).collect();
    expected.push((1.0 - covered).max(0.0) * total);
    let mut statistic = 0.0;
    let mut cells = 0;
    for (o, e) in observed.iter().zip(&expected) {
        if *e > 0.0 {
            statistic += (*o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    let dof = cells - 1;
    let critical = ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha);
    ChiSquare {
        statistic,
        critical,
        dof,
        covered_mass: covered,
    }
}

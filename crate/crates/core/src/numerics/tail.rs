//! Geometric tail bounds for series of eventually log-concave-ish terms.
//!
//! For the series summed in this crate the term ratio `t[n+1]/t[n]` converges
//! monotonically to a known limit `L < 1` once past a small index. From that
//! point every later ratio is at most `r = max(last observed ratio, L)`, so
//! the omitted tail is bounded by `t[n] * r / (1 - r)`.

/// Ratios this close to one are not certified.
pub const RATIO_CAP: f64 = 1.0 - 1e-9;

/// Number of consecutive strictly monotone ratios required before certifying.
const MONOTONE_RUN: usize = 3;

#[derive(Debug, Clone)]
pub struct GeometricTail {
    limit: f64,
    min_index: u64,
    prev_ln: Option<f64>,
    ratios: [f64; MONOTONE_RUN],
    seen: usize,
}

impl GeometricTail {
    /// `limit` is the asymptotic term ratio; no bound is issued before
    /// `min_index`.
    pub fn new(limit: f64, min_index: u64) -> Self {
        Self {
            limit,
            min_index,
            prev_ln: None,
            ratios: [0.0; MONOTONE_RUN],
            seen: 0,
        }
    }

    pub fn limit(&self) -> f64 {
        self.limit
    }

    /// Feeds `ln |t[n]|` and returns a bound on `Σ_{m>n} |t[m]|` when the
    /// ratio sequence has stabilised.
    pub fn observe(&mut self, n: u64, ln_abs_term: f64) -> Option<f64> {
        if ln_abs_term == f64::NEG_INFINITY {
            // A vanishing term breaks the ratio sequence.
            self.prev_ln = None;
            self.seen = 0;
            return None;
        }
        let prev = self.prev_ln.replace(ln_abs_term);
        let ratio = (ln_abs_term - prev?).exp();
        self.ratios.rotate_left(1);
        self.ratios[MONOTONE_RUN - 1] = ratio;
        self.seen += 1;

        if n < self.min_index || self.seen < MONOTONE_RUN {
            return None;
        }
        let r = &self.ratios;
        let increasing = r.windows(2).all(|w| w[0] < w[1]);
        let decreasing = r.windows(2).all(|w| w[0] > w[1]);
        if !(increasing || decreasing) {
            return None;
        }
        let r_hat = ratio.max(self.limit);
        if !(r_hat < RATIO_CAP) {
            return None;
        }
        Some(ln_abs_term.exp() * r_hat / (1.0 - r_hat))
    }
}

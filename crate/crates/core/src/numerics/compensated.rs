//! Compensated (Kahan–Babuška / Neumaier) summation.

/// Running sum with a separate compensation term for lost low-order bits.
///
/// Uses Neumaier's variant, which also recovers the small addend when a new
/// term is larger in magnitude than the running sum. After summing finite
/// terms `x_i` the result satisfies `|result - exact| <= 2ε Σ|x_i|` (plus one
/// rounding of the final value).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedAccumulator {
    sum: f64,
    compensation: f64,
}

impl CompensatedAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current compensated value.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// The raw (uncompensated) running sum.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn compensation(&self) -> f64 {
        self.compensation
    }
}

impl Extend<f64> for CompensatedAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

/// Compensated sum of a sequence of finite terms.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms
        .into_iter()
        .collect::<CompensatedAccumulator>()
        .value()
}

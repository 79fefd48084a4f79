//! Small floating-point helpers shared by the analytic modules.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Sum of the absolute values of every added term.
    pub fn magnitude(&self) -> f64 {
        self.abs_sum
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `e^x - 1 - x` without cancellation for small `x`.
pub fn exp_m1_minus_x(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // x^2/2! + x^3/3! + ... ; 14 terms leave < 1e-17 relative at |x| = 0.1
        let mut term = x * x / 2.0;
        let mut sum = 0.0;
        for k in 3..=16 {
            sum += term;
            term *= x / k as f64;
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// Binomial coefficient as f64; exact for the small orders used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

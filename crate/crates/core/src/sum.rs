//! Compensated summation.
//!
//! Exact enumeration averages up to millions of batch losses; the Neumaier
//! variant of Kahan summation keeps the accumulated error at a few ulps
//! independent of the number of terms.

/// Running Neumaier sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
    count: u64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            comp: 0.0,
            count: 0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.count += 1;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Mean of the added terms, `NaN` when empty.
    pub fn mean(&self) -> f64 {
        self.total() / self.count as f64
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of a sequence.
pub fn sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().total()
}

/// Compensated mean of a slice; `NaN` for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    sum(xs.iter().copied()) / xs.len() as f64
}

/// Mean and sample standard deviation (divisor `len - 1`) in two passes.
///
/// The mean is taken relative to the first element, so a constant sequence
/// returns that constant exactly.
pub fn mean_and_sample_std(xs: &[f64]) -> (f64, f64) {
    let Some(&first) = xs.first() else {
        return (f64::NAN, 0.0);
    };
    let m = first + sum(xs.iter().map(|x| x - first)) / xs.len() as f64;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let ss = sum(xs.iter().map(|x| (x - m) * (x - m)));
    (m, libm::sqrt(ss / (xs.len() - 1) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(xs), 2.0);
        let naive: f64 = xs.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn many_small_terms() {
        let s: NeumaierSum = core::iter::repeat(0.1).take(1_000_000).collect();
        assert!((s.total() - 100_000.0).abs() < 1e-9);
        assert_eq!(s.count(), 1_000_000);
    }

    #[test]
    fn std_of_constant_is_zero() {
        let (m, s) = mean_and_sample_std(&[0.1 + 0.2; 17]);
        assert_eq!(m, 0.1 + 0.2);
        assert_eq!(s, 0.0);
    }
}

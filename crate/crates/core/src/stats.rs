use serde::Serialize;

/// A Monte Carlo estimate: sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation divided by `sqrt(samples)`.
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Summarizes `values` in iteration order (two passes, sequential).
    pub fn from_values<I>(values: I, seed: u64) -> Self
    where
        I: IntoIterator<Item = f64>,
        I::IntoIter: Clone,
    {
        let iter = values.into_iter();
        let mut count = 0usize;
        let mut sum = 0.0;
        for v in iter.clone() {
            sum += v;
            count += 1;
        }
        assert!(count > 0, "an estimate needs at least one sample");
        let mean = sum / count as f64;
        let std_error = if count > 1 {
            let ss: f64 = iter.map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1) as f64).sqrt() / (count as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            samples: count,
            seed,
        }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

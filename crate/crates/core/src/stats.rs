//! Summary statistics for Monte Carlo estimates.

use serde::{Deserialize, Serialize};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilsonInterval {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl WilsonInterval {
    pub fn new(successes: u64, trials: u64, z: f64) -> Self {
        if trials == 0 {
            return Self {
                successes,
                trials,
                estimate: 0.0,
                lower: 0.0,
                upper: 1.0,
            };
        }
        let n = trials as f64;
        let p_hat = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = p_hat + z2 / (2.0 * n);
        let radius = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
        Self {
            successes,
            trials,
            estimate: p_hat,
            lower: if successes == 0 {
                0.0
            } else {
                ((center - radius) / denom).max(0.0)
            },
            upper: if successes >= trials {
                1.0
            } else {
                ((center + radius) / denom).min(1.0)
            },
        }
    }

    pub fn at_95(successes: u64, trials: u64) -> Self {
        Self::new(successes, trials, Z95)
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStderr {
    pub n: u64,
    pub mean: f64,
    pub stderr: f64,
}

impl MeanStderr {
    pub fn of<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let values: Vec<f64> = values.into_iter().collect();
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            n: n as u64,
            mean,
            stderr,
        }
    }

    /// `sqrt(se_a^2 + se_b^2)`.
    pub fn combined_stderr(&self, other: &Self) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

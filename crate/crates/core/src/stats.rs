//! Small statistical estimators shared by the samplers and certifications.

use alloc::vec::Vec;

use crate::num;

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Mean with a symmetric normal-approximation interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
}

impl MeanEstimate {
    pub fn from_parts(mean: f64, std_error: f64, samples: usize) -> Self {
        MeanEstimate {
            mean,
            std_error,
            ci_low: mean - Z95 * std_error,
            ci_high: mean + Z95 * std_error,
            samples,
        }
    }

    /// I.i.d. estimate: `se = s / sqrt(n)`.
    pub fn iid(values: &[f64]) -> Self {
        let (mean, var) = mean_variance(values);
        let n = values.len().max(1) as f64;
        MeanEstimate::from_parts(mean, num::sqrt(var / n), values.len())
    }

    /// Correlated-chain estimate: standard error from the effective sample size.
    pub fn correlated(values: &[f64]) -> Self {
        let (mean, var) = mean_variance(values);
        let ess = effective_sample_size(values).max(1.0);
        MeanEstimate::from_parts(mean, num::sqrt(var / ess), values.len())
    }
}

/// Sample mean and unbiased variance (zero variance for fewer than two values).
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n - 1) as f64)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * num::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Effective sample size by Geyer's initial monotone sequence estimator.
pub fn effective_sample_size(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 4 {
        return n as f64;
    }
    let (mean, _) = mean_variance(values);
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64
    };
    let gamma0 = autocov(0);
    if gamma0 <= 0.0 {
        return n as f64;
    }
    let mut sum = 0.0;
    let mut previous = f64::INFINITY;
    let mut m = 0;
    while 2 * m + 1 < n {
        let pair = autocov(2 * m) + autocov(2 * m + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(previous);
        sum += pair;
        previous = pair;
        m += 1;
    }
    let tau = (2.0 * sum / gamma0 - 1.0).max(1.0 / n as f64);
    (n as f64 / tau).min(n as f64)
}

/// `log(mean(exp(x_i)))` with a jackknife interval, computed with a max shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMeanEstimate {
    pub log_mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `(Σ w)² / Σ w²` for the weights `w_i = exp(x_i - max)`.
    pub effective_samples: f64,
    pub samples: usize,
}

/// Below this many effective samples the estimate is dominated by a few draws.
pub const HEAVY_TAIL_THRESHOLD: f64 = 10.0;

impl LogMeanEstimate {
    pub fn heavy_tailed(&self) -> bool {
        self.effective_samples < HEAVY_TAIL_THRESHOLD
    }

    pub fn estimate(&self) -> f64 {
        num::exp(self.log_mean)
    }
}

/// [`log_mean_exp_blocked`] with one observation per block.
pub fn log_mean_exp(log_values: &[f64]) -> LogMeanEstimate {
    log_mean_exp_blocked(log_values, log_values.len())
}

/// `log(mean(exp(x_i)))` with a delete-a-block jackknife interval over
/// `blocks` contiguous blocks (use fewer blocks than samples for correlated chains).
pub fn log_mean_exp_blocked(log_values: &[f64], blocks: usize) -> LogMeanEstimate {
    let n = log_values.len();
    let blocks = blocks.clamp(1, n.max(1));
    if n == 0 {
        return LogMeanEstimate {
            log_mean: f64::NEG_INFINITY,
            std_error: f64::INFINITY,
            ci_low: f64::NEG_INFINITY,
            ci_high: f64::INFINITY,
            effective_samples: 0.0,
            samples: 0,
        };
    }
    let (argmax, shift) = log_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let weights: Vec<f64> = log_values.iter().map(|v| num::exp(v - shift)).collect();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    let block_of = |i: usize| i * blocks / n;
    let mut block_sums = alloc::vec![0.0; blocks];
    let mut block_len = alloc::vec![0usize; blocks];
    for (i, w) in weights.iter().enumerate() {
        block_sums[block_of(i)] += w;
        block_len[block_of(i)] += 1;
    }
    let max_block = block_of(argmax);
    // total without the block holding the maximum, summed directly to keep precision
    let rest: f64 = block_sums
        .iter()
        .enumerate()
        .filter(|(b, _)| *b != max_block)
        .map(|(_, s)| s)
        .sum();
    let total = rest + block_sums[max_block];
    let log_mean = shift + num::ln(total / n as f64);
    let effective_samples = total * total / sum_sq;
    if blocks < 2 {
        return LogMeanEstimate {
            log_mean,
            std_error: f64::INFINITY,
            ci_low: f64::NEG_INFINITY,
            ci_high: f64::INFINITY,
            effective_samples,
            samples: n,
        };
    }
    let leave_out = |b: usize| -> f64 {
        let others = if b == max_block { rest } else { total - block_sums[b] };
        shift + num::ln(others / (n - block_len[b]) as f64)
    };
    let g = blocks as f64;
    let jack_mean = (0..blocks).map(leave_out).sum::<f64>() / g;
    let jack_var = (0..blocks)
        .map(|b| {
            let d = leave_out(b) - jack_mean;
            d * d
        })
        .sum::<f64>()
        * (g - 1.0)
        / g;
    let std_error = if jack_var.is_finite() { num::sqrt(jack_var) } else { f64::INFINITY };
    LogMeanEstimate {
        log_mean,
        std_error,
        ci_low: log_mean - Z95 * std_error,
        ci_high: log_mean + Z95 * std_error,
        effective_samples,
        samples: n,
    }
}

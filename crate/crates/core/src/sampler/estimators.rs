//! Monte Carlo estimators over sample streams: count laws, Laplace
//! functionals, domination comparisons, and partition-function bounds.

use alloc::vec::Vec;

use crate::configuration::PointConfiguration;
use crate::error::{Error, Result};
use crate::geometry::BoxDomain;
use crate::num;
use crate::potential::{ReflectedPotential, SiteFunction};
use crate::stats::{self, LogMeanEstimate, MeanEstimate};

/// Empirical law of `M_Λ` with Wilson intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct CountPmfEstimate {
    /// `hits[n]` = number of samples with exactly `n` points.
    pub hits: Vec<u64>,
    pub samples: u64,
    pub probabilities: Vec<f64>,
    pub intervals: Vec<(f64, f64)>,
}

impl CountPmfEstimate {
    pub fn probability(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    /// Wilson interval for `P(M = n)` at normal quantile `z`.
    pub fn interval(&self, n: usize, z: f64) -> (f64, f64) {
        stats::wilson_interval(self.hits.get(n).copied().unwrap_or(0), self.samples, z)
    }

    pub fn hits(&self, n: usize) -> u64 {
        self.hits.get(n).copied().unwrap_or(0)
    }

    pub fn max_count(&self) -> usize {
        self.hits.len().saturating_sub(1)
    }
}

/// Empirical pmf of a stream of counts.
pub fn estimate_count_pmf(counts: impl IntoIterator<Item = usize>) -> Result<CountPmfEstimate> {
    let mut hits: Vec<u64> = Vec::new();
    let mut samples = 0u64;
    for n in counts {
        if n >= hits.len() {
            hits.resize(n + 1, 0);
        }
        hits[n] += 1;
        samples += 1;
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "sample stream is empty"));
    }
    let probabilities = hits.iter().map(|h| *h as f64 / samples as f64).collect();
    let intervals = hits.iter().map(|h| stats::wilson_interval(*h, samples, stats::Z95)).collect();
    Ok(CountPmfEstimate {
        hits,
        samples,
        probabilities,
        intervals,
    })
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("t", "must be nonnegative and finite"))
    }
}

fn laplace_logs<F: SiteFunction>(samples: &[PointConfiguration], u: &F, t: f64) -> Vec<f64> {
    samples
        .iter()
        .map(|c| t * c.points().iter().map(|p| u.value(p)).sum::<f64>())
        .collect()
}

/// `E[exp(t Σ_j u(x_j))]` over independent samples, on log scale with a jackknife interval.
pub fn laplace_functional_mc<F: SiteFunction>(samples: &[PointConfiguration], u: &F, t: f64) -> Result<LogMeanEstimate> {
    check_t(t)?;
    if samples.is_empty() {
        return Err(Error::invalid("samples", "sample stream is empty"));
    }
    Ok(stats::log_mean_exp(&laplace_logs(samples, u, t)))
}

/// As [`laplace_functional_mc`] for correlated chain output, jackknifing over `blocks` contiguous blocks.
pub fn laplace_functional_mc_blocked<F: SiteFunction>(
    samples: &[PointConfiguration],
    u: &F,
    t: f64,
    blocks: usize,
) -> Result<LogMeanEstimate> {
    check_t(t)?;
    if samples.is_empty() {
        return Err(Error::invalid("samples", "sample stream is empty"));
    }
    Ok(stats::log_mean_exp_blocked(&laplace_logs(samples, u, t), blocks))
}

/// `exp(z ∫ (e^{t u(x)} - 1) dx)`, the Laplace functional of the Poisson process of
/// intensity `z` on `window`; the support of `u` must lie inside `window`.
pub fn poisson_laplace_closed_form<F: SiteFunction>(u: &F, t: f64, z: f64, window: &BoxDomain) -> Result<f64> {
    Ok(num::exp(log_poisson_laplace(u, t, z, window)?))
}

/// Logarithm of [`poisson_laplace_closed_form`].
pub fn log_poisson_laplace<F: SiteFunction>(u: &F, t: f64, z: f64, window: &BoxDomain) -> Result<f64> {
    check_t(t)?;
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::invalid("z", "must be positive and finite"));
    }
    let (lo, hi) = u.support_bounds();
    if !(window.contains(&lo) && window.contains(&hi)) {
        return Err(Error::invalid("window", "support of u must lie inside the window"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(z * u.integral_of(&|v| num::exp_m1(t * v))?)
}

/// A configuration functional for domination checks.
pub trait ConfigFunctional {
    fn evaluate(&self, config: &PointConfiguration) -> f64;

    /// Caller's declaration that `supp η ⊂ supp γ ⇒ f(η) ≤ f(γ)`.
    fn is_increasing(&self) -> bool;
}

/// `M_Λ(η)`.
#[derive(Clone, Debug)]
pub struct CountIn(pub BoxDomain);

impl ConfigFunctional for CountIn {
    fn evaluate(&self, config: &PointConfiguration) -> f64 {
        config.count_in(&self.0) as f64
    }

    fn is_increasing(&self) -> bool {
        true
    }
}

/// `Σ_j u(x_j)` for a nonnegative site function.
#[derive(Clone, Debug)]
pub struct SiteSum(pub ReflectedPotential);

impl ConfigFunctional for SiteSum {
    fn evaluate(&self, config: &PointConfiguration) -> f64 {
        self.0.site_sum(config)
    }

    fn is_increasing(&self) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl ConfigFunctional for Constant {
    fn evaluate(&self, _config: &PointConfiguration) -> f64 {
        self.0
    }

    fn is_increasing(&self) -> bool {
        true
    }
}

/// Result of comparing `∫ f dP` against `∫ f dπ^z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominationReport {
    pub gibbs: MeanEstimate,
    pub poisson: MeanEstimate,
    /// Standard error of the difference of means.
    pub sigma: f64,
    /// `mean_gibbs <= mean_poisson + 3σ`.
    pub holds: bool,
}

/// Compares an increasing functional under Gibbs (chain output, ESS-corrected)
/// and Poisson (independent) samples.
pub fn check_domination<F: ConfigFunctional + ?Sized>(
    gibbs: &[PointConfiguration],
    poisson: &[PointConfiguration],
    f: &F,
) -> Result<DominationReport> {
    if !f.is_increasing() {
        return Err(Error::NonMonotoneFunctional);
    }
    if gibbs.is_empty() || poisson.is_empty() {
        return Err(Error::invalid("samples", "sample stream is empty"));
    }
    let g: Vec<f64> = gibbs.iter().map(|c| f.evaluate(c)).collect();
    let p: Vec<f64> = poisson.iter().map(|c| f.evaluate(c)).collect();
    let gibbs = MeanEstimate::correlated(&g);
    let poisson = MeanEstimate::iid(&p);
    let sigma = num::sqrt(gibbs.std_error * gibbs.std_error + poisson.std_error * poisson.std_error);
    Ok(DominationReport {
        gibbs,
        poisson,
        sigma,
        holds: gibbs.mean <= poisson.mean + 3.0 * sigma,
    })
}

/// `(e^{-|Λ|}, exp(|Λ|(e^{-a} - 1)))` for a local energy bounded below by `a`.
pub fn partition_bounds(window: &BoxDomain, a: f64) -> (f64, f64) {
    let v = window.volume();
    (num::exp(-v), num::exp(v * num::exp_m1(-a)))
}

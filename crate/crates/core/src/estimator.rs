//! Monte Carlo joint photon counting and maximum-likelihood estimation of the loss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::factorial::ln_binomial;

use crate::error::{invalid, Error, Result};

/// Lower edge of the estimator's domain; the upper edge is `1 − ALPHA_FLOOR`.
pub const ALPHA_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub nbar: f64,
    pub alpha_true: f64,
    pub shots: u64,
    pub trials: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(nbar: f64, alpha_true: f64, shots: u64, trials: u64, seed: u64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return invalid("nbar", nbar, "mean photon number must be finite and >= 0");
        }
        if !(0.0..1.0).contains(&alpha_true) {
            return invalid("alpha_true", alpha_true, "loss fraction must lie in [0, 1)");
        }
        if shots == 0 {
            return invalid("shots", 0.0, "need at least one shot");
        }
        if trials == 0 {
            return invalid("trials", 0.0, "need at least one trial");
        }
        Ok(Self {
            nbar,
            alpha_true,
            shots,
            trials,
            seed,
        })
    }

    /// `tanh²r = n̄/(n̄+1)`.
    fn ratio(&self) -> f64 {
        self.nbar / (self.nbar + 1.0)
    }

    /// Counting Fisher information per shot, `n̄/(α(1−α))`.
    pub fn fisher_per_shot(&self) -> f64 {
        self.nbar / (self.alpha_true * (1.0 - self.alpha_true))
    }
}

/// One joint detection: `ancilla_m` photons in the ancilla, `probe_n ≤ ancilla_m` in the probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CountRecord {
    pub ancilla_m: u64,
    pub probe_n: u64,
}

/// Random stream for one trial; every trial draws from its own stream of the seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Samples `shots` records of trial `trial`.
pub fn sample_trial(config: &ExperimentConfig, trial: u64) -> Vec<CountRecord> {
    let mut rng = trial_rng(config.seed, trial);
    let t = config.ratio();
    let ln_t = t.ln();
    let keep = 1.0 - config.alpha_true;
    (0..config.shots)
        .map(|_| {
            let m = if t == 0.0 {
                0
            } else {
                // P(m ≥ k) = tᵏ
                let u: f64 = 1.0 - rng.random::<f64>();
                (u.ln() / ln_t).floor() as u64
            };
            let n = Binomial::new(m, keep).expect("survival probability lies in (0, 1]").sample(&mut rng);
            CountRecord {
                ancilla_m: m,
                probe_n: n,
            }
        })
        .collect()
}

/// Records of the first trial.
pub fn sample_counts(config: &ExperimentConfig) -> Vec<CountRecord> {
    sample_trial(config, 0)
}

fn totals(records: &[CountRecord]) -> (f64, f64) {
    let (lost, kept) = records.iter().fold((0u64, 0u64), |(l, k), r| {
        (l + (r.ancilla_m - r.probe_n), k + r.probe_n)
    });
    (lost as f64, kept as f64)
}

fn check_records(records: &[CountRecord]) -> Result<()> {
    if let Some(r) = records.iter().find(|r| r.probe_n > r.ancilla_m) {
        return Err(Error::InvalidDistribution(format!(
            "record has {} probe photons but only {} ancilla photons",
            r.probe_n, r.ancilla_m
        )));
    }
    if records.iter().all(|r| r.ancilla_m == 0) {
        return Err(Error::NotEstimable("no photon pairs were detected"));
    }
    Ok(())
}

/// `Σ ln p_{n_i m_i}(α)` for the two-mode squeezed probe with `nbar` photons per beam.
pub fn log_likelihood(records: &[CountRecord], nbar: f64, alpha: f64) -> f64 {
    let t = nbar / (nbar + 1.0);
    let head = -nbar.ln_1p();
    records
        .iter()
        .map(|r| {
            let (m, n) = (r.ancilla_m, r.probe_n);
            let weight = if m == 0 { head } else { head + m as f64 * t.ln() };
            let lost = (m - n) as f64;
            let kept = n as f64;
            let loss_term = if lost > 0.0 { lost * alpha.ln() } else { 0.0 };
            let keep_term = if kept > 0.0 { kept * (-alpha).ln_1p() } else { 0.0 };
            weight + ln_binomial(m, n) + loss_term + keep_term
        })
        .sum()
}

/// Maximum-likelihood estimate together with whether it hit the domain edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub alpha: f64,
    pub clamped: bool,
}

/// Closed-form MLE: the fraction of lost photons, `Σ(m−n)/Σm`, clamped to
/// `[ALPHA_FLOOR, 1 − ALPHA_FLOOR]`. The weights `|c_m|²` do not depend on `α`,
/// so `nbar` only matters for the likelihood value, not its maximizer.
pub fn estimate(records: &[CountRecord]) -> Result<Estimate> {
    check_records(records)?;
    let (lost, kept) = totals(records);
    let raw = lost / (lost + kept);
    let alpha = raw.clamp(ALPHA_FLOOR, 1.0 - ALPHA_FLOOR);
    Ok(Estimate {
        alpha,
        clamped: alpha != raw,
    })
}

pub fn mle(records: &[CountRecord], nbar: f64) -> Result<f64> {
    if !(nbar >= 0.0) {
        return invalid("nbar", nbar, "mean photon number must be >= 0");
    }
    estimate(records).map(|e| e.alpha)
}

/// `log L(b) − log L(a)` accurate even when `b` is close to `a`.
fn log_likelihood_gain(lost: f64, kept: f64, a: f64, b: f64) -> f64 {
    let d = b - a;
    lost * (d / a).ln_1p() + kept * (-d / (1.0 - a)).ln_1p()
}

/// Golden-section maximization of the likelihood over the estimator domain.
/// Used to verify [`mle`].
pub fn golden_section_mle(records: &[CountRecord], tol: f64) -> Result<f64> {
    check_records(records)?;
    let (lost, kept) = totals(records);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (ALPHA_FLOOR, 1.0 - ALPHA_FLOOR);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    while hi - lo > tol {
        if log_likelihood_gain(lost, kept, x1, x2) > 0.0 {
            lo = x1;
            x1 = x2;
            x2 = lo + ratio * (hi - lo);
        } else {
            hi = x2;
            x2 = x1;
            x1 = hi - ratio * (hi - lo);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Outcome of repeating the experiment `trials` times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrlbReport {
    pub alpha_true: f64,
    pub nbar: f64,
    pub shots: u64,
    pub trials: u64,
    pub seed: u64,
    pub mean_estimate: f64,
    pub empirical_variance: f64,
    pub crlb: f64,
    pub ratio: f64,
    pub clamp_count: u64,
}

impl CrlbReport {
    /// Standard error of `mean_estimate`.
    pub fn standard_error(&self) -> f64 {
        (self.empirical_variance / self.trials as f64).sqrt()
    }
}

/// Estimates per trial, in trial order.
pub fn trial_estimates(config: &ExperimentConfig) -> Result<Vec<Estimate>> {
    (0..config.trials)
        .into_par_iter()
        .map(|trial| estimate(&sample_trial(config, trial)))
        .collect()
}

/// Compares the spread of the MLE over trials with `1/(N F)`, `F = n̄/(α(1−α))`.
pub fn crlb_check(config: &ExperimentConfig) -> Result<CrlbReport> {
    if config.alpha_true == 0.0 {
        return invalid("alpha_true", 0.0, "the bound is only finite for loss inside (0, 1)");
    }
    if config.nbar == 0.0 {
        return Err(Error::NotEstimable("vacuum probe carries no information"));
    }
    if config.trials < 2 {
        return invalid("trials", config.trials as f64, "a variance needs at least two trials");
    }
    let estimates = trial_estimates(config)?;
    let k = estimates.len() as f64;
    let mean = estimates.iter().map(|e| e.alpha).sum::<f64>() / k;
    let variance = estimates.iter().map(|e| (e.alpha - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let crlb = 1.0 / (config.shots as f64 * config.fisher_per_shot());
    Ok(CrlbReport {
        alpha_true: config.alpha_true,
        nbar: config.nbar,
        shots: config.shots,
        trials: config.trials,
        seed: config.seed,
        mean_estimate: mean,
        empirical_variance: variance,
        crlb,
        ratio: variance / crlb,
        clamp_count: estimates.iter().filter(|e| e.clamped).count() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// Pearson test of the ancilla photon histogram against `|c_m|² = (1−t)tᵐ`.
/// Bins with expected count below 5 are pooled into the tail bin.
pub fn ancilla_histogram_test(records: &[CountRecord], nbar: f64) -> Result<ChiSquareTest> {
    if !(nbar > 0.0) {
        return invalid("nbar", nbar, "test needs a nonzero photon number");
    }
    let total = records.len() as f64;
    let t = nbar / (nbar + 1.0);
    let mut bins = 0usize;
    while total * (1.0 - t) * t.powi(bins as i32) >= 5.0 && total * t.powi(bins as i32 + 1) >= 5.0 {
        bins += 1;
    }
    if bins < 1 {
        return invalid("records", total, "too few records for a histogram test");
    }
    let mut observed = vec![0.0; bins + 1];
    for r in records {
        observed[(r.ancilla_m as usize).min(bins)] += 1.0;
    }
    let statistic = observed
        .iter()
        .enumerate()
        .map(|(m, &o)| {
            let p = if m < bins { (1.0 - t) * t.powi(m as i32) } else { t.powi(bins as i32) };
            let e = total * p;
            (o - e).powi(2) / e
        })
        .sum::<f64>();
    let dof = bins as u64;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}

//! Seeded sampling experiments over factor families, cross-validating the
//! spectral engine.
//!
//! Products are never formed directly: the first digit of `X_1···X_M`
//! depends only on `Σ log_B mantissa(X_m) mod 1`, so every trial walks the
//! circle. Trials draw from per-trial substreams of the counter-based
//! generator, which makes histograms bit-identical across thread counts.

use crate::benford::{distance_to_benford, Base, DigitDistribution, DistanceMetric};
use crate::convolution::{self, fejer_bin_masses, l1_distance_to_uniform, VerdictKind};
use crate::density::frac;
use crate::error::{Mod1Error, Result};
use crate::families::{FactorFamily, FamilySequence};
use crate::rng::CounterRng;
use serde::Serialize;
use std::path::PathBuf;

/// Full description of one sampling experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub base: Base,
    /// Number of factors M in each product / circle sum.
    pub factor_count: usize,
    /// Number of independent trials.
    pub trials: u64,
    pub seed: u64,
    pub family: FactorFamily,
    /// Spectrum truncation for the spectral cross-check.
    pub truncation: usize,
    /// Where the CLI writes results; unused by the library itself.
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.factor_count < 1 {
            return Err(Mod1Error::config("factor count must be at least 1"));
        }
        if self.trials < 1 {
            return Err(Mod1Error::config("trial count must be at least 1"));
        }
        if self.truncation < 1 {
            return Err(Mod1Error::config("truncation must be at least 1"));
        }
        self.family.validate()
    }

    fn sequence(&self) -> Result<FamilySequence> {
        self.family.with_base(self.base)
    }
}

/// Walk one trial: the circle position of `log_B |X_1 ··· X_M|`.
fn trial_position(seq: &FamilySequence, factors: usize, seed: u64, trial: u64) -> f64 {
    let mut rng = CounterRng::new(seed, trial);
    let mut y = 0.0f64;
    for m in 1..=factors {
        y = frac(y + seq.sample_log_mantissa(m, &mut rng));
    }
    y
}

/// First digit of a mantissa with circle log `y`, clamped into range.
fn first_digit(base: Base, y: f64) -> usize {
    let digit = base.value().powf(y).floor() as usize;
    digit.clamp(1, base.digit_count())
}

#[cfg(feature = "parallel")]
fn tally<T: Send + Sync + Clone>(
    trials: u64,
    size: usize,
    bucket: impl Fn(u64) -> usize + Sync,
    _marker: std::marker::PhantomData<T>,
) -> Vec<u64> {
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; size],
            |mut acc, t| {
                acc[bucket(t)] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

#[cfg(not(feature = "parallel"))]
fn tally<T>(
    trials: u64,
    size: usize,
    bucket: impl Fn(u64) -> usize + Sync,
    _marker: std::marker::PhantomData<T>,
) -> Vec<u64> {
    let mut acc = vec![0u64; size];
    for t in 0..trials {
        acc[bucket(t)] += 1;
    }
    acc
}

/// Empirical first-digit distribution of the product `X_1 ··· X_M` over
/// `cfg.trials` trials. Deterministic for a fixed seed, independent of the
/// parallel schedule.
pub fn simulate_product_digits(cfg: &ExperimentConfig) -> Result<DigitDistribution> {
    cfg.validate()?;
    let seq = cfg.sequence()?;
    let k = cfg.base.digit_count();
    let counts = tally::<()>(
        cfg.trials,
        k,
        |t| {
            first_digit(
                cfg.base,
                trial_position(&seq, cfg.factor_count, cfg.seed, t),
            ) - 1
        },
        std::marker::PhantomData,
    );
    DigitDistribution::from_counts(cfg.base, &counts)
}

/// Empirical histogram of the circle sum `Y_1 + ... + Y_M mod 1`.
#[derive(Clone, Debug, Serialize)]
pub struct SumHistogram {
    pub bins: usize,
    pub trials: u64,
    pub counts: Vec<u64>,
    /// `Σ_b |p̂_b - 1/bins|`: L¹ distance between the histogram and flat.
    pub l1_to_flat: f64,
}

impl SumHistogram {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.trials as f64)
            .collect()
    }
}

/// Simulate the circle sum and bin it into `bins` equal cells.
pub fn simulate_sum_mod1(cfg: &ExperimentConfig, bins: usize) -> Result<SumHistogram> {
    cfg.validate()?;
    if bins < 2 {
        return Err(Mod1Error::config("need at least 2 bins"));
    }
    let seq = cfg.sequence()?;
    let counts = tally::<()>(
        cfg.trials,
        bins,
        |t| {
            let y = trial_position(&seq, cfg.factor_count, cfg.seed, t);
            ((y * bins as f64) as usize).min(bins - 1)
        },
        std::marker::PhantomData,
    );
    let w = 1.0 / bins as f64;
    let l1 = counts
        .iter()
        .map(|&c| (c as f64 / cfg.trials as f64 - w).abs())
        .sum();
    Ok(SumHistogram {
        bins,
        trials: cfg.trials,
        counts,
        l1_to_flat: l1,
    })
}

/// Side-by-side spectral and empirical view of one experiment.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralEmpiricalReport {
    pub factor_count: usize,
    pub trials: u64,
    pub bins: usize,
    /// Empirical digit L1 distance to the Benford law.
    pub empirical_digit_l1: f64,
    /// Empirical circle-histogram L1 distance to flat.
    pub empirical_hist_l1: f64,
    /// Grid L1 distance of the Fejér reconstruction to 1.
    pub spectral_grid_l1: f64,
    /// The Fejér reconstruction binned like the histogram, distance to flat.
    pub spectral_binned_l1: f64,
    /// The coefficient bound dominating the reconstruction distance.
    pub fejer_bound: f64,
    /// `Σ_b sqrt(q_b (1-q_b) / T)` over spectral bin masses: the Monte Carlo
    /// fluctuation scale of the binned comparison.
    pub mc_standard_error: f64,
    /// `|empirical_hist_l1 - spectral_binned_l1|`.
    pub binned_disagreement: f64,
    /// Set when the disagreement exceeds three standard errors.
    pub flagged: bool,
    /// Product-criterion verdict at horizon = factor_count.
    pub verdict: VerdictKind,
}

/// Run both routes over the same configuration and compare like for like:
/// the empirical histogram estimates the bin masses of the true sum density,
/// the spectral column bins the Fejér reconstruction the same way.
pub fn spectral_vs_empirical_report(
    cfg: &ExperimentConfig,
    bins: usize,
) -> Result<SpectralEmpiricalReport> {
    cfg.validate()?;
    let seq = cfg.sequence()?;

    let digits = simulate_product_digits(cfg)?;
    let empirical_digit_l1 = distance_to_benford(&digits, DistanceMetric::L1)?;
    let hist = simulate_sum_mod1(cfg, bins)?;

    let cs = convolution::sum_mod1_spectrum(&seq, cfg.factor_count, cfg.truncation)?;
    let grid = (2 * cfg.truncation + 1).max(4 * bins);
    let spectral = l1_distance_to_uniform(&cs, grid)?;
    let masses = fejer_bin_masses(&cs.spectrum, bins)?;
    let w = 1.0 / bins as f64;
    let spectral_binned_l1: f64 = masses.iter().map(|&q| (q - w).abs()).sum();
    let mc_standard_error: f64 = masses
        .iter()
        .map(|&q| {
            let q = q.clamp(0.0, 1.0);
            (q * (1.0 - q) / cfg.trials as f64).sqrt()
        })
        .sum();
    let binned_disagreement = (hist.l1_to_flat - spectral_binned_l1).abs();
    let verdict = convolution::convergence_verdict(&seq, cfg.truncation, cfg.factor_count, 1e-6)?;

    Ok(SpectralEmpiricalReport {
        factor_count: cfg.factor_count,
        trials: cfg.trials,
        bins,
        empirical_digit_l1,
        empirical_hist_l1: hist.l1_to_flat,
        spectral_grid_l1: spectral.grid_l1,
        spectral_binned_l1,
        fejer_bound: spectral.fejer_bound,
        mc_standard_error,
        binned_disagreement,
        flagged: binned_disagreement > 3.0 * mc_standard_error,
        verdict: verdict.verdict,
    })
}

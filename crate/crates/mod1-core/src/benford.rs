//! Mantissa and first-digit mathematics in an arbitrary base, and distances
//! between digit distributions.
//!
//! The circle connection: the first digit of a product depends only on the
//! base-B log of its mantissa, reduced mod 1, so digit laws are integrals of
//! circle densities over digit intervals `[log_B j, log_B (j+1))`.

use crate::density::CircleDensity;
use crate::error::{Mod1Error, Result};
use serde::Serialize;

/// A digit base: an integer `B ≥ 2`, or Euler's number kept symbolic so that
/// natural-log mantissa arithmetic stays exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(into = "String")]
pub enum Base {
    Integer(u32),
    Euler,
}

impl Base {
    pub fn integer(b: u32) -> Result<Base> {
        if b < 2 {
            return Err(Mod1Error::domain(format!(
                "base must be at least 2, got {b}"
            )));
        }
        Ok(Base::Integer(b))
    }

    pub fn value(self) -> f64 {
        match self {
            Base::Integer(b) => b as f64,
            Base::Euler => std::f64::consts::E,
        }
    }

    pub fn ln(self) -> f64 {
        match self {
            Base::Integer(b) => (b as f64).ln(),
            Base::Euler => 1.0,
        }
    }

    /// log base self of x.
    pub fn log(self, x: f64) -> f64 {
        match self {
            Base::Integer(b) => x.log(b as f64),
            Base::Euler => x.ln(),
        }
    }

    /// Number of possible first digits: `B - 1` for integer bases, and two
    /// (mantissa in `[1,2)` or `[2,e)`) for base e.
    pub fn digit_count(self) -> usize {
        match self {
            Base::Integer(b) => (b - 1) as usize,
            Base::Euler => 2,
        }
    }

    /// Circle cut points of the digit intervals: digit `j` covers
    /// `[cut(j-1), cut(j))` with `cut(0) = 0` and the last cut equal to 1.
    fn digit_cut(self, j: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        if j == self.digit_count() {
            return 1.0;
        }
        self.log((j + 1) as f64)
    }

    pub fn parse(text: &str) -> Result<Base> {
        match text.trim() {
            "e" | "euler" | "Euler" => Ok(Base::Euler),
            other => {
                let b: u32 = other
                    .parse()
                    .map_err(|_| Mod1Error::config(format!("unrecognized base '{other}'")))?;
                Base::integer(b)
            }
        }
    }
}

impl From<Base> for String {
    fn from(b: Base) -> String {
        match b {
            Base::Integer(v) => v.to_string(),
            Base::Euler => "euler".to_string(),
        }
    }
}

impl std::fmt::Display for Base {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Base::Integer(v) => write!(f, "{v}"),
            Base::Euler => write!(f, "euler"),
        }
    }
}

/// The unique `M ∈ [1, B)` with `x = M · B^k` for integer `k`.
///
/// Computed as `x · B^{-floor(log_B x)}` with one corrective renormalization,
/// which keeps values like `x = 1000` from landing on the wrong side of a
/// power of B.
pub fn mantissa(x: f64, base: Base) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Mod1Error::domain(format!(
            "mantissa needs a positive finite argument, got {x}"
        )));
    }
    let b = base.value();
    let k = base.log(x).floor();
    let mut m = x / b.powf(k);
    if m >= b {
        m /= b;
    }
    if m < 1.0 {
        m *= b;
    }
    // A second pass never fires in practice, but the contract is [1, B).
    if m >= b {
        m /= b;
    }
    Ok(m)
}

/// The Benford cumulative law: probability of a mantissa at most `s` is
/// `log_B s`, for `s ∈ [1, B]`.
pub fn benford_cdf(s: f64, base: Base) -> Result<f64> {
    let b = base.value();
    if !(1.0..=b).contains(&s) {
        return Err(Mod1Error::domain(format!(
            "mantissa bound {s} outside [1, {b}]"
        )));
    }
    Ok(base.log(s))
}

/// Where first-digit probabilities came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DigitSource {
    /// Integrated from an exact density.
    Exact,
    /// Tallied from samples.
    Empirical { sample_count: u64 },
}

/// Per-first-digit probabilities in some base.
#[derive(Clone, Debug, Serialize)]
pub struct DigitDistribution {
    base: Base,
    /// `probabilities[j - 1]` is the probability of first digit `j`.
    probabilities: Vec<f64>,
    source: DigitSource,
}

impl DigitDistribution {
    pub fn exact(base: Base, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != base.digit_count() {
            return Err(Mod1Error::domain(format!(
                "expected {} digit probabilities, got {}",
                base.digit_count(),
                probabilities.len()
            )));
        }
        Ok(DigitDistribution {
            base,
            probabilities,
            source: DigitSource::Exact,
        })
    }

    /// Empirical frequencies from per-digit counts (`counts[j-1]` for digit `j`).
    pub fn from_counts(base: Base, counts: &[u64]) -> Result<Self> {
        if counts.len() != base.digit_count() {
            return Err(Mod1Error::domain(format!(
                "expected {} digit counts, got {}",
                base.digit_count(),
                counts.len()
            )));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Mod1Error::domain("no samples tallied"));
        }
        Ok(DigitDistribution {
            base,
            probabilities: counts.iter().map(|&c| c as f64 / total as f64).collect(),
            source: DigitSource::Empirical {
                sample_count: total,
            },
        })
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn source(&self) -> DigitSource {
        self.source
    }

    /// Probability of first digit `j` (1-based).
    pub fn probability(&self, j: usize) -> f64 {
        self.probabilities[j - 1]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn digits(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| (i + 1, p))
    }
}

/// The exact Benford first-digit probabilities
/// `P(j) = log_B(j+1) - log_B(j)` (last digit interval truncated at B).
pub fn benford_digit_probabilities(base: Base) -> DigitDistribution {
    let k = base.digit_count();
    let probabilities = (1..=k)
        .map(|j| base.digit_cut(j) - base.digit_cut(j - 1))
        .collect();
    DigitDistribution {
        base,
        probabilities,
        source: DigitSource::Exact,
    }
}

/// Push a circle density (the law of `log_B` mantissa on `[0,1)`) forward to
/// a first-digit distribution by integrating over digit intervals.
pub fn digit_distribution_from_circle_density(
    d: &CircleDensity,
    base: Base,
) -> Result<DigitDistribution> {
    let k = base.digit_count();
    let mut probabilities = Vec::with_capacity(k);
    for j in 1..=k {
        probabilities.push(d.mass_in(base.digit_cut(j - 1), base.digit_cut(j))?);
    }
    DigitDistribution::exact(base, probabilities)
}

/// Supported distances from a digit distribution to the Benford law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMetric {
    L1,
    Sup,
    ChiSquare,
}

/// Distance between `dd` and the exact Benford distribution in its base.
/// The chi-square statistic is `n Σ (p_j - b_j)²/b_j` and is only defined
/// for empirical distributions.
pub fn distance_to_benford(dd: &DigitDistribution, metric: DistanceMetric) -> Result<f64> {
    let reference = benford_digit_probabilities(dd.base());
    match metric {
        DistanceMetric::L1 => Ok(dd
            .probabilities()
            .iter()
            .zip(reference.probabilities())
            .map(|(p, b)| (p - b).abs())
            .sum()),
        DistanceMetric::Sup => Ok(dd
            .probabilities()
            .iter()
            .zip(reference.probabilities())
            .map(|(p, b)| (p - b).abs())
            .fold(0.0, f64::max)),
        DistanceMetric::ChiSquare => match dd.source() {
            DigitSource::Empirical { sample_count } => Ok(sample_count as f64
                * dd.probabilities()
                    .iter()
                    .zip(reference.probabilities())
                    .map(|(p, b)| (p - b) * (p - b) / b)
                    .sum::<f64>()),
            DigitSource::Exact => Err(Mod1Error::ChiSquareOnExact),
        },
    }
}

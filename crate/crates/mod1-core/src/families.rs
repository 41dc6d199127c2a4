//! Named density families with closed-form spectra and samplers: narrow box
//! densities centered at 1/8, a modified Pareto law on `[e, ∞)` whose log has
//! infinite variance for small shape, and the generic mantissa wraparound.

use crate::benford::Base;
use crate::density::{frac, unit_phase, CircleDensity, DensitySequence};
use crate::error::{Mod1Error, Result};
use crate::quadrature;
use crate::rng::CounterRng;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// `sin(t)/t` with the removable singularity filled in.
pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

/// Closed-form coefficient of the height-`m` box at 1/8:
/// `e^{-2πin/8} · sinc(πn/m)`. Valid for any `m ≥ 2` by periodicity, and
/// degrades gracefully to a pure phase as `m → ∞`.
pub fn box_spectrum_coefficient(height: f64, n: i64) -> Complex64 {
    unit_phase(n as f64 / 8.0) * sinc(PI * n as f64 / height)
}

/// The box density of height `m ≥ 2`: value `m` on `|x - 1/8| ≤ 1/(2m)`,
/// reduced mod 1, zero elsewhere.
#[derive(Clone, Copy, Debug)]
pub struct BoxDensity {
    height: f64,
}

impl BoxDensity {
    pub const CENTER: f64 = 0.125;

    pub fn new(height: f64) -> Result<Self> {
        if !height.is_finite() || height < 2.0 {
            return Err(Mod1Error::domain(format!(
                "box height must be a finite value >= 2, got {height}"
            )));
        }
        Ok(BoxDensity { height })
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn half_width(&self) -> f64 {
        0.5 / self.height
    }

    pub fn coefficient(&self, n: i64) -> Complex64 {
        box_spectrum_coefficient(self.height, n)
    }

    /// The box as a circle density, closed-form spectrum attached and
    /// edges declared as breakpoints.
    pub fn density(&self) -> CircleDensity {
        let height = self.height;
        let hw = self.half_width();
        CircleDensity::continuous(move |x| {
            if crate::density::circle_distance(x, Self::CENTER) <= hw {
                height
            } else {
                0.0
            }
        })
        .with_breakpoints([frac(Self::CENTER - hw), frac(Self::CENTER + hw)])
        .with_analytic_coefficients(move |n| box_spectrum_coefficient(height, n))
    }

    /// Inverse-CDF sample of the box location from a uniform `u ∈ [0,1)`:
    /// `(1/8 + (u - 1/2)/m) mod 1`. Once `1/m` falls below the floating-point
    /// resolution at 1/8 the jitter rounds away and the sample is exactly
    /// 1/8; the degradation is consistent in distribution to double
    /// precision.
    pub fn sample_log_mantissa(&self, u: f64) -> f64 {
        frac(Self::CENTER + (u - 0.5) / self.height)
    }

    /// CDF of the box location on `[0,1)`; handles the wrapped case `m < 4`.
    pub fn log_mantissa_cdf(&self, t: f64) -> f64 {
        let hw = self.half_width();
        let lo = Self::CENTER - hw;
        let hi = Self::CENTER + hw;
        let overlap = |a: f64, b: f64| -> f64 { (b.min(t) - a.max(0.0)).max(0.0) };
        let len = if lo >= 0.0 {
            overlap(lo, hi)
        } else {
            overlap(0.0, hi) + overlap(1.0 + lo, 1.0)
        };
        (self.height * len).min(1.0)
    }
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a+k)^{-s}` for `s > 1`, `a > 0`, by
/// Euler–Maclaurin summation. Absolute accuracy near machine precision for
/// the shapes used here (`s ≤ ~12`, `a ≤ ~3`).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    const CUT: usize = 20;
    // B_{2j}/(2j)! for j = 1..=6.
    const COEF: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
    ];
    let mut sum = 0.0;
    for k in 0..CUT {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + CUT as f64;
    sum += x.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * x.powf(-s);
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    for (j, c) in COEF.iter().enumerate() {
        sum += c * rising * power;
        let t = s + (2 * j + 1) as f64;
        rising *= t * (t + 1.0);
        power /= x * x;
    }
    sum
}

/// The modified Pareto law: density `α / (x · ln^{α+1} x)` on `[e, ∞)`.
/// Its log is a standard Pareto on `[1, ∞)` with index `α`, which has
/// infinite variance for `α ≤ 2`.
#[derive(Clone, Copy, Debug)]
pub struct ModifiedPareto {
    alpha: f64,
}

impl ModifiedPareto {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Mod1Error::domain(format!(
                "pareto shape must be positive, got {alpha}"
            )));
        }
        Ok(ModifiedPareto { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Density value at `x`; zero below `e`.
    pub fn density(&self, x: f64) -> f64 {
        if x < std::f64::consts::E {
            0.0
        } else {
            self.alpha / (x * x.ln().powf(self.alpha + 1.0))
        }
    }

    /// CDF `1 - (ln x)^{-α}` on `[e, ∞)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < std::f64::consts::E {
            0.0
        } else {
            1.0 - x.ln().powf(-self.alpha)
        }
    }

    /// Inverse-CDF sample from `u ∈ (0,1)`: `exp((1-u)^{-1/α})`.
    pub fn sample(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Mod1Error::domain(format!(
                "sampling uniform must lie in (0,1), got {u}"
            )));
        }
        Ok(((1.0 - u).powf(-1.0 / self.alpha)).exp())
    }

    fn require_summable(&self) -> Result<()> {
        if self.alpha <= 1.0 {
            return Err(Mod1Error::domain(format!(
                "mantissa series needs alpha > 1 for convergence, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Density of the base-e mantissa at `s ∈ [1, e]`:
    /// `α Σ_{m≥1} 1/(s · (ln s + m)^{α+1})`, summed to `terms` terms.
    ///
    /// Returns `(partial_sum, tail_bound)` where the integral-test bound
    /// `(terms + ln s)^{-α} / s` certifies the truncation. The sum starts at
    /// `m = 1`: the `m = 0` decade is `[1, e)`, where the law has no mass.
    pub fn mantissa_density(&self, s: f64, terms: usize) -> Result<(f64, f64)> {
        self.require_summable()?;
        check_mantissa_arg(s)?;
        if terms < 1 {
            return Err(Mod1Error::domain("need at least one series term"));
        }
        let c = s.ln();
        let mut sum = 0.0;
        for m in 1..=terms {
            sum += (m as f64 + c).powf(-self.alpha - 1.0);
        }
        let value = self.alpha * sum / s;
        let tail = (terms as f64 + c).powf(-self.alpha) / s;
        Ok((value, tail))
    }

    /// CDF of the base-e mantissa at `s ∈ [1, e]`:
    /// `Σ_{m≥1} [m^{-α} - (m + ln s)^{-α}]`, summed to `terms` terms, with
    /// tail bound `ln s · terms^{-α}`. Same `m = 1` start as the density;
    /// starting at `m = 0` would make the harmonic-like sum diverge.
    pub fn mantissa_cdf(&self, s: f64, terms: usize) -> Result<(f64, f64)> {
        self.require_summable()?;
        check_mantissa_arg(s)?;
        if terms < 1 {
            return Err(Mod1Error::domain("need at least one series term"));
        }
        let c = s.ln();
        let mut sum = 0.0;
        for m in 1..=terms {
            let m = m as f64;
            sum += m.powf(-self.alpha) - (m + c).powf(-self.alpha);
        }
        let tail = c * (terms as f64).powf(-self.alpha);
        Ok((sum, tail))
    }

    /// Exact circle CDF of `log mantissa` base e, via Hurwitz zeta:
    /// `F(t) = ζ(α, 1) - ζ(α, 1 + t)`.
    pub fn log_mantissa_cdf(&self, t: f64) -> Result<f64> {
        self.require_summable()?;
        let t = t.clamp(0.0, 1.0);
        Ok(hurwitz_zeta(self.alpha, 1.0) - hurwitz_zeta(self.alpha, 1.0 + t))
    }

    /// The wrapped circle density of `log_B mantissa`:
    /// `g(t) = (α / ln^α B) · ζ(α+1, t + k₀(t))` where `k₀(t)` is the first
    /// wrap index whose decade intersects the support.
    pub fn log_mantissa_density(&self, base: Base) -> Result<CircleDensity> {
        let alpha = self.alpha;
        let c = base.ln();
        let scale = alpha / c.powf(alpha);
        let eval = move |t: f64| {
            let k0 = (1.0 / c - t).ceil().max(0.0);
            scale * hurwitz_zeta(alpha + 1.0, t + k0)
        };
        // The wrap count jumps where 1/ln B - t crosses an integer.
        let kink = frac(1.0 / c);
        let breakpoints: Vec<f64> = if kink > 0.0 { vec![kink] } else { vec![] };
        Ok(CircleDensity::continuous(eval).with_breakpoints(breakpoints))
    }
}

fn check_mantissa_arg(s: f64) -> Result<()> {
    if !(1.0..=std::f64::consts::E).contains(&s) {
        return Err(Mod1Error::domain(format!(
            "mantissa argument {s} outside [1, e]"
        )));
    }
    Ok(())
}

/// A density on `(0, ∞)` with a declared effective support, for the
/// mantissa wraparound sum.
#[derive(Clone)]
pub struct PositiveDensity {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    support: (f64, f64),
    breakpoints: Vec<f64>,
}

impl PositiveDensity {
    pub fn new(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: (f64, f64),
    ) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Mod1Error::domain(format!(
                "declared support must satisfy 0 < lo < hi < inf, got ({lo}, {hi})"
            )));
        }
        Ok(PositiveDensity {
            eval: Arc::new(eval),
            support,
            breakpoints: Vec::new(),
        })
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints = points.into_iter().collect();
        self
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
}

/// Probability that the base-B mantissa of a draw from `f` lies in `[1, s)`,
/// by the wraparound sum of per-decade integrals
/// `Σ_m ∫_{B^m}^{s·B^m} f(x) dx` truncated to `|m| ≤ m_range`.
///
/// Returns `(value, truncation_bound)` where the bound is the density mass
/// the covered decades failed to account for. Errors when the decade range
/// does not cover the declared support.
pub fn mantissa_pushforward_cdf(
    f: &PositiveDensity,
    s: f64,
    base: Base,
    m_range: u32,
) -> Result<(f64, f64)> {
    let b = base.value();
    if !(1.0..=b).contains(&s) {
        return Err(Mod1Error::domain(format!(
            "mantissa bound {s} outside [1, {b}]"
        )));
    }
    let (lo, hi) = f.support;
    let needed_low = -base.log(lo); // need B^{-m_range} <= lo
    let needed_high = base.log(hi) - 1.0; // need B^{m_range + 1} >= hi
    let needed = needed_low.max(needed_high).max(0.0).ceil() as u32;
    if needed > m_range {
        return Err(Mod1Error::InsufficientRange { m_range, needed });
    }

    let mut value = 0.0;
    let mut covered = 0.0;
    let eval = &f.eval;
    for m in -(m_range as i64)..=(m_range as i64) {
        let decade_lo = b.powi(m as i32);
        let decade_hi = b.powi(m as i32 + 1);
        let a = decade_lo.max(lo);
        let z = decade_hi.min(hi);
        if z <= a {
            continue;
        }
        let full = quadrature::integrate(&|x| eval(x), a, z, &f.breakpoints, 1e-12, 4000)?;
        covered += full.value;
        let partial_hi = (s * decade_lo).min(z);
        if partial_hi > a {
            let part =
                quadrature::integrate(&|x| eval(x), a, partial_hi, &f.breakpoints, 1e-12, 4000)?;
            value += part.value;
        }
    }
    Ok((value, (1.0 - covered).max(0.0)))
}

/// A named factor family: the descriptor montecarlo experiments and the CLI
/// configure sequences with.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FactorFamily {
    Uniform,
    /// The fixed box of the given height, repeated.
    Box {
        height: f64,
    },
    /// Boxes of height `base^m` at factor index m: ever-narrower spikes.
    BoxPowers {
        base: f64,
    },
    /// `1 + amplitude·cos(2πx)`, repeated.
    RaisedCosine {
        amplitude: f64,
    },
    /// A fixed atomic density, repeated.
    Atoms {
        atoms: Vec<(f64, f64)>,
    },
    /// Modified Pareto mantissa law with the given shape, repeated.
    Pareto {
        alpha: f64,
    },
    /// Cycle through a list of simple families (no nesting).
    Cycle {
        factors: Vec<FactorFamily>,
    },
}

impl FactorFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            FactorFamily::Uniform => Ok(()),
            FactorFamily::Box { height } => BoxDensity::new(*height).map(|_| ()),
            FactorFamily::BoxPowers { base } => {
                if base.is_nan() || *base <= 1.0 {
                    Err(Mod1Error::config(format!(
                        "box power base must exceed 1, got {base}"
                    )))
                } else {
                    Ok(())
                }
            }
            FactorFamily::RaisedCosine { amplitude } => {
                if !(0.0..=0.99).contains(amplitude) {
                    Err(Mod1Error::config(format!(
                        "raised cosine amplitude must lie in [0, 0.99], got {amplitude}"
                    )))
                } else {
                    Ok(())
                }
            }
            FactorFamily::Atoms { atoms } => CircleDensity::atomic(atoms.iter().copied())
                .map(|_| ())
                .map_err(|e| Mod1Error::config(e.to_string())),
            FactorFamily::Pareto { alpha } => ModifiedPareto::new(*alpha).map(|_| ()),
            FactorFamily::Cycle { factors } => {
                if factors.is_empty() {
                    return Err(Mod1Error::config("cycle needs at least one family"));
                }
                for f in factors {
                    if matches!(f, FactorFamily::Cycle { .. } | FactorFamily::Pareto { .. }) {
                        return Err(Mod1Error::config(
                            "cycles may only contain uniform, box, raised-cosine or atom families",
                        ));
                    }
                    f.validate()?;
                }
                Ok(())
            }
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            FactorFamily::Uniform => "uniform".into(),
            FactorFamily::Box { height } => format!("box({height})"),
            FactorFamily::BoxPowers { base } => format!("box({base}^m)"),
            FactorFamily::RaisedCosine { amplitude } => format!("raised-cosine({amplitude})"),
            FactorFamily::Atoms { atoms } => format!("atoms[{}]", atoms.len()),
            FactorFamily::Pareto { alpha } => format!("pareto({alpha})"),
            FactorFamily::Cycle { factors } => format!("cycle[{}]", factors.len()),
        }
    }

    fn default_base(&self) -> Base {
        match self {
            FactorFamily::Pareto { .. } => Base::Euler,
            _ => Base::Integer(10),
        }
    }

    /// Bind the family to a digit base, yielding a usable density sequence.
    pub fn with_base(&self, base: Base) -> Result<FamilySequence> {
        self.validate()?;
        let pareto_factor = match self {
            FactorFamily::Pareto { alpha } => {
                Some(ModifiedPareto::new(*alpha)?.log_mantissa_density(base)?)
            }
            _ => None,
        };
        Ok(FamilySequence {
            family: self.clone(),
            base,
            pareto_factor,
        })
    }

    /// Bind to the family's natural base (e for the Pareto family, 10
    /// otherwise). Panics on invalid parameters; use [`Self::with_base`]
    /// for fallible construction.
    pub fn sequence(&self) -> FamilySequence {
        self.with_base(self.default_base())
            .expect("invalid factor family parameters")
    }
}

/// A [`FactorFamily`] bound to a digit base.
#[derive(Clone, Debug)]
pub struct FamilySequence {
    family: FactorFamily,
    base: Base,
    pareto_factor: Option<CircleDensity>,
}

impl FamilySequence {
    pub fn family(&self) -> &FactorFamily {
        &self.family
    }

    pub fn base(&self) -> Base {
        self.base
    }

    fn member_at(&self, m: usize) -> &FactorFamily {
        match &self.family {
            FactorFamily::Cycle { factors } => &factors[(m - 1) % factors.len()],
            other => other,
        }
    }

    fn box_power_height(&self, m: usize) -> f64 {
        match &self.family {
            FactorFamily::BoxPowers { base } => base.powi(m as i32),
            _ => unreachable!(),
        }
    }

    /// Draw one log-mantissa sample for factor `m` from the given stream.
    pub fn sample_log_mantissa(&self, m: usize, rng: &mut CounterRng) -> f64 {
        if let FactorFamily::BoxPowers { .. } = &self.family {
            let height = self.box_power_height(m);
            let u = rng.next_f64();
            return frac(BoxDensity::CENTER + (u - 0.5) / height);
        }
        match self.member_at(m) {
            FactorFamily::Uniform => rng.next_f64(),
            FactorFamily::Box { height } => {
                let b = BoxDensity::new(*height).expect("validated at construction");
                b.sample_log_mantissa(rng.next_f64())
            }
            FactorFamily::RaisedCosine { amplitude } => {
                sample_raised_cosine(*amplitude, rng.next_f64())
            }
            FactorFamily::Atoms { atoms } => {
                let u = rng.next_f64();
                let mut acc = 0.0;
                for &(loc, w) in atoms {
                    acc += w;
                    if u < acc {
                        return frac(loc);
                    }
                }
                frac(atoms.last().expect("validated nonempty").0)
            }
            FactorFamily::Pareto { alpha } => {
                let u = rng.next_open01();
                let y = (1.0 - u).powf(-1.0 / alpha);
                frac(y / self.base.ln())
            }
            FactorFamily::BoxPowers { .. } | FactorFamily::Cycle { .. } => unreachable!(),
        }
    }
}

/// Invert the raised-cosine CDF `F(x) = x + a sin(2πx)/(2π)` by safeguarded
/// Newton iteration.
fn sample_raised_cosine(amplitude: f64, u: f64) -> f64 {
    use std::f64::consts::TAU;
    let cdf = |x: f64| x + amplitude * (TAU * x).sin() / TAU;
    let pdf = |x: f64| 1.0 + amplitude * (TAU * x).cos();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x = u;
    for _ in 0..64 {
        let err = cdf(x) - u;
        if err.abs() < 1e-15 {
            break;
        }
        if err > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = x - err / pdf(x);
        x = if step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
    }
    frac(x)
}

impl DensitySequence for FamilySequence {
    fn factor(&self, m: usize) -> CircleDensity {
        if let FactorFamily::BoxPowers { .. } = &self.family {
            let height = self.box_power_height(m);
            return if height.is_finite() {
                BoxDensity::new(height)
                    .expect("power heights exceed 2")
                    .density()
            } else {
                // Beyond double range the box is a point mass at the center.
                CircleDensity::point_mass(BoxDensity::CENTER)
            };
        }
        match self.member_at(m) {
            FactorFamily::Uniform => CircleDensity::uniform(),
            FactorFamily::Box { height } => BoxDensity::new(*height)
                .expect("validated at construction")
                .density(),
            FactorFamily::RaisedCosine { amplitude } => {
                CircleDensity::raised_cosine(*amplitude).expect("validated at construction")
            }
            FactorFamily::Atoms { atoms } => {
                CircleDensity::atomic(atoms.iter().copied()).expect("validated at construction")
            }
            FactorFamily::Pareto { .. } => {
                self.pareto_factor.clone().expect("built at construction")
            }
            FactorFamily::BoxPowers { .. } | FactorFamily::Cycle { .. } => unreachable!(),
        }
    }

    fn factor_coefficient(&self, m: usize, n: i64) -> Result<Complex64> {
        if let FactorFamily::BoxPowers { .. } = &self.family {
            return Ok(box_spectrum_coefficient(self.box_power_height(m), n));
        }
        match self.member_at(m) {
            FactorFamily::Box { height } => Ok(box_spectrum_coefficient(*height, n)),
            _ => self.factor(m).fourier_coefficient(n),
        }
    }

    fn is_identical(&self) -> bool {
        match &self.family {
            FactorFamily::BoxPowers { .. } => false,
            FactorFamily::Cycle { factors } => factors.len() == 1,
            _ => true,
        }
    }
}

/// Parse `"1/2"`, `"0.5"` etc.
pub fn parse_fraction(text: &str) -> Result<f64> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| Mod1Error::config(format!("bad fraction '{text}'")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| Mod1Error::config(format!("bad fraction '{text}'")))?;
        if d == 0.0 {
            return Err(Mod1Error::config(format!("zero denominator in '{text}'")));
        }
        Ok(n / d)
    } else {
        text.parse()
            .map_err(|_| Mod1Error::config(format!("bad number '{text}'")))
    }
}

fn params_map(params: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for piece in params.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        match piece.split_once('=') {
            Some((k, v)) => out.push((k.trim().to_string(), v.trim().to_string())),
            None => {
                return Err(Mod1Error::config(format!(
                    "expected key=value, got '{piece}'"
                )))
            }
        }
    }
    Ok(out)
}

fn lookup<'a>(params: &'a [(String, String)], keys: &[&str]) -> Option<&'a str> {
    params
        .iter()
        .find(|(k, _)| keys.contains(&k.as_str()))
        .map(|(_, v)| v.as_str())
}

/// Parse atom entries: `"0:0.5,1/2:0.5"` (weighted) or `"0,1/2"` (equal).
fn parse_atoms(text: &str) -> Result<Vec<(f64, f64)>> {
    let entries: Vec<&str> = text
        .trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if entries.is_empty() {
        return Err(Mod1Error::config("no atoms given"));
    }
    let weighted = entries.iter().any(|e| e.contains(':'));
    let mut atoms = Vec::with_capacity(entries.len());
    for e in &entries {
        if weighted {
            let (loc, w) = e
                .split_once(':')
                .ok_or_else(|| Mod1Error::config(format!("expected loc:weight, got '{e}'")))?;
            atoms.push((parse_fraction(loc)?, parse_fraction(w)?));
        } else {
            atoms.push((parse_fraction(e)?, 1.0 / entries.len() as f64));
        }
    }
    Ok(atoms)
}

impl FactorFamily {
    /// Build from a family name and a `key=value` parameter string, the
    /// shape the CLI flags use.
    pub fn from_name_params(name: &str, params: &str) -> Result<Self> {
        let name = name.trim().to_ascii_lowercase();
        let family = match name.as_str() {
            "uniform" => FactorFamily::Uniform,
            "box" => {
                let map = params_map(params)?;
                let height = lookup(&map, &["m", "height", "i"])
                    .ok_or_else(|| Mod1Error::config("box needs m=<height>"))?;
                FactorFamily::Box {
                    height: parse_fraction(height)?,
                }
            }
            "box11" => {
                let map = params_map(params)?;
                let base = match lookup(&map, &["base"]) {
                    Some(v) => parse_fraction(v)?,
                    None => 11.0,
                };
                FactorFamily::BoxPowers { base }
            }
            "box-powers" | "boxpowers" => {
                let map = params_map(params)?;
                let base = match lookup(&map, &["base", "b"]) {
                    Some(v) => parse_fraction(v)?,
                    None => 11.0,
                };
                FactorFamily::BoxPowers { base }
            }
            "box-cycle" | "boxcycle" => {
                let map = params_map(params)?;
                let heights = lookup(&map, &["heights"])
                    .ok_or_else(|| Mod1Error::config("box-cycle needs heights=h1+h2+..."))?;
                let factors: Result<Vec<FactorFamily>> = heights
                    .split('+')
                    .map(|h| {
                        Ok(FactorFamily::Box {
                            height: parse_fraction(h)?,
                        })
                    })
                    .collect();
                FactorFamily::Cycle { factors: factors? }
            }
            "raised-cosine" | "cosine" => {
                let map = params_map(params)?;
                let amplitude = match lookup(&map, &["c", "amplitude", "a"]) {
                    Some(v) => parse_fraction(v)?,
                    None => 0.5,
                };
                FactorFamily::RaisedCosine { amplitude }
            }
            "atoms" => FactorFamily::Atoms {
                atoms: parse_atoms(params)?,
            },
            "pareto" => {
                let map = params_map(params)?;
                let alpha = lookup(&map, &["alpha", "a"])
                    .ok_or_else(|| Mod1Error::config("pareto needs alpha=<shape>"))?;
                FactorFamily::Pareto {
                    alpha: parse_fraction(alpha)?,
                }
            }
            other => {
                return Err(Mod1Error::config(format!("unknown family '{other}'")));
            }
        };
        family.validate()?;
        Ok(family)
    }

    /// Parse a compact sequence descriptor, e.g. `"box:i=2 repeated"`,
    /// `"box:11^m"`, `"atoms:{0,1/2} repeated"`, `"pareto:alpha=2"`.
    pub fn parse_descriptor(descriptor: &str) -> Result<Self> {
        let desc = descriptor.trim();
        let desc = desc.strip_suffix(" repeated").unwrap_or(desc).trim();
        let (name, rest) = match desc.split_once(':') {
            Some((n, r)) => (n.trim().to_ascii_lowercase(), r.trim().to_string()),
            None => (desc.to_ascii_lowercase(), String::new()),
        };
        let family = match name.as_str() {
            "uniform" => FactorFamily::Uniform,
            "box" => {
                if let Some(base) = rest.strip_suffix("^m") {
                    FactorFamily::BoxPowers {
                        base: parse_fraction(base)?,
                    }
                } else if let Some(heights) = rest.strip_prefix("cycle=") {
                    return FactorFamily::from_name_params(
                        "box-cycle",
                        &format!("heights={heights}"),
                    );
                } else if rest.contains('=') {
                    return FactorFamily::from_name_params("box", &rest);
                } else {
                    FactorFamily::Box {
                        height: parse_fraction(&rest)?,
                    }
                }
            }
            "atoms" => FactorFamily::Atoms {
                atoms: parse_atoms(&rest)?,
            },
            "pareto" => {
                if rest.contains('=') {
                    return FactorFamily::from_name_params("pareto", &rest);
                }
                FactorFamily::Pareto {
                    alpha: parse_fraction(&rest)?,
                }
            }
            "raised-cosine" | "cosine" => {
                if rest.contains('=') {
                    return FactorFamily::from_name_params("raised-cosine", &rest);
                }
                FactorFamily::RaisedCosine {
                    amplitude: parse_fraction(&rest)?,
                }
            }
            "box11" | "box-powers" | "boxpowers" => {
                return FactorFamily::from_name_params(&name, &rest);
            }
            other => {
                return Err(Mod1Error::config(format!(
                    "unknown sequence descriptor '{other}'"
                )));
            }
        };
        family.validate()?;
        Ok(family)
    }
}

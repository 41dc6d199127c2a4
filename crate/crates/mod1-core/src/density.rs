//! Probability densities on the circle `[0,1)` and their Fourier spectra.
//!
//! A density is either continuous (an evaluable function, optionally with a
//! closed-form coefficient map) or atomic (a finite list of point masses).
//! Mixed measures are rejected at construction. All circle locations are
//! reduced to `[0,1)` by `x - floor(x)`; the representative of `1.0` is `0.0`.

use crate::error::{Mod1Error, Result};
use crate::quadrature;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::Arc;

/// Absolute tolerance for quadrature-derived Fourier coefficients.
pub const COEFFICIENT_TOL: f64 = 1e-10;
/// Tolerance for conjugate-symmetry checks in Fejér sums.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Reduce to the canonical representative in `[0,1)`.
pub fn frac(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Distance between two circle points, at most 1/2.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = frac(x - y);
    d.min(1.0 - d)
}

/// `e^{-2πi t}` with the argument reduced mod 1 first, so lattice phases
/// (for example atoms at rationals) come out exact.
pub fn unit_phase(t: f64) -> Complex64 {
    let theta = -TAU * frac(t);
    Complex64::new(theta.cos(), theta.sin())
}

/// One point mass: a location in `[0,1)` and a strictly positive weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// A finite list of point masses with weights summing to one.
#[derive(Clone, Debug)]
pub struct AtomicDensity {
    atoms: Vec<Atom>,
}

impl AtomicDensity {
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(location, weight)| Atom {
                location: frac(location),
                weight,
            })
            .collect();
        if atoms.is_empty() {
            return Err(Mod1Error::domain("atomic density needs at least one atom"));
        }
        for a in &atoms {
            if a.weight.is_nan() || a.weight <= 0.0 {
                return Err(Mod1Error::domain(format!(
                    "atom weight must be strictly positive, got {}",
                    a.weight
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Mod1Error::domain(format!(
                "atom weights must sum to 1, got {total}"
            )));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Exact coefficient: `Σ_k w_k e^{-2πi n α_k}`.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        self.atoms
            .iter()
            .map(|a| a.weight * unit_phase(n as f64 * a.location))
            .sum()
    }

    /// Total weight carried by atoms in `[lo, hi)`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.location >= lo && a.location < hi)
            .map(|a| a.weight)
            .sum()
    }
}

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type CoeffFn = Arc<dyn Fn(i64) -> Complex64 + Send + Sync>;

/// An evaluable density on `[0,1)`, with optional closed-form coefficients
/// and declared discontinuity points for the integrator.
#[derive(Clone)]
pub struct ContinuousDensity {
    eval: EvalFn,
    analytic: Option<CoeffFn>,
    breakpoints: Vec<f64>,
}

impl std::fmt::Debug for ContinuousDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContinuousDensity")
            .field("analytic", &self.analytic.is_some())
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl ContinuousDensity {
    pub fn evaluate(&self, x: f64) -> f64 {
        (self.eval)(frac(x))
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn has_analytic_coefficients(&self) -> bool {
        self.analytic.is_some()
    }

    /// Quadrature of `∫ g(x) e^{-2πinx} dx` over `[0,1)`, ignoring any
    /// closed form. Split at declared breakpoints and at least once per
    /// oscillation period.
    pub fn coefficient_by_quadrature(&self, n: i64) -> Result<Complex64> {
        let mut splits = self.breakpoints.clone();
        let periods = n.unsigned_abs().max(1) as usize;
        for k in 1..periods {
            splits.push(k as f64 / periods as f64);
        }
        let max_panels = 2000 + 8 * periods;
        let eval = &self.eval;
        let w = TAU * n as f64;
        let re = quadrature::integrate(
            &|x| eval(x) * (w * x).cos(),
            0.0,
            1.0,
            &splits,
            0.5 * COEFFICIENT_TOL,
            max_panels,
        )?;
        let im = quadrature::integrate(
            &|x| eval(x) * (w * x).sin(),
            0.0,
            1.0,
            &splits,
            0.5 * COEFFICIENT_TOL,
            max_panels,
        )?;
        Ok(Complex64::new(re.value, -im.value))
    }
}

/// Which of the two closed cases a density is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityKind {
    Continuous,
    Atomic,
}

/// A probability density on the circle `[0,1)`.
#[derive(Clone, Debug)]
pub enum CircleDensity {
    Continuous(ContinuousDensity),
    Atomic(AtomicDensity),
}

impl CircleDensity {
    /// A continuous density from an evaluation closure. The closure receives
    /// arguments already reduced to `[0,1)`.
    pub fn continuous(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        CircleDensity::Continuous(ContinuousDensity {
            eval: Arc::new(eval),
            analytic: None,
            breakpoints: Vec::new(),
        })
    }

    /// Declare discontinuity points so quadrature splits there.
    /// No effect on atomic densities.
    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        if let CircleDensity::Continuous(c) = &mut self {
            let mut pts: Vec<f64> = points.into_iter().map(frac).collect();
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup();
            c.breakpoints = pts;
        }
        self
    }

    /// Attach a closed-form coefficient map `n ↦ ĝ(n)`.
    /// No effect on atomic densities.
    pub fn with_analytic_coefficients(
        mut self,
        coeff: impl Fn(i64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        if let CircleDensity::Continuous(c) = &mut self {
            c.analytic = Some(Arc::new(coeff));
        }
        self
    }

    pub fn atomic(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        Ok(CircleDensity::Atomic(AtomicDensity::new(atoms)?))
    }

    /// A unit point mass at `alpha`.
    pub fn point_mass(alpha: f64) -> Self {
        CircleDensity::Atomic(
            AtomicDensity::new([(alpha, 1.0)]).expect("single unit atom is always valid"),
        )
    }

    /// The uniform density, with its exact spectrum attached.
    pub fn uniform() -> Self {
        CircleDensity::continuous(|_| 1.0).with_analytic_coefficients(|n| {
            if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `1 + c·cos(2πx)` for `|c| ≤ 1`; spectrum is `{1, c/2, c/2}`.
    pub fn raised_cosine(c: f64) -> Result<Self> {
        if c.is_nan() || c.abs() > 1.0 {
            return Err(Mod1Error::domain(format!(
                "raised cosine amplitude must satisfy |c| <= 1, got {c}"
            )));
        }
        Ok(
            CircleDensity::continuous(move |x| 1.0 + c * (TAU * x).cos())
                .with_analytic_coefficients(move |n| match n {
                    0 => Complex64::new(1.0, 0.0),
                    1 | -1 => Complex64::new(c / 2.0, 0.0),
                    _ => Complex64::new(0.0, 0.0),
                }),
        )
    }

    pub fn kind(&self) -> DensityKind {
        match self {
            CircleDensity::Continuous(_) => DensityKind::Continuous,
            CircleDensity::Atomic(_) => DensityKind::Atomic,
        }
    }

    pub fn as_continuous(&self) -> Option<&ContinuousDensity> {
        match self {
            CircleDensity::Continuous(c) => Some(c),
            CircleDensity::Atomic(_) => None,
        }
    }

    pub fn as_atomic(&self) -> Option<&AtomicDensity> {
        match self {
            CircleDensity::Continuous(_) => None,
            CircleDensity::Atomic(a) => Some(a),
        }
    }

    /// The Fourier coefficient `ĝ(n) = ∫₀¹ g(x) e^{-2πinx} dx`.
    ///
    /// Uses the closed form when one is attached, exact phase sums for atoms,
    /// and adaptive quadrature (absolute tolerance 1e-10) otherwise.
    pub fn fourier_coefficient(&self, n: i64) -> Result<Complex64> {
        match self {
            CircleDensity::Atomic(a) => Ok(a.coefficient(n)),
            CircleDensity::Continuous(c) => match &c.analytic {
                Some(f) => Ok(f(n)),
                None => c.coefficient_by_quadrature(n),
            },
        }
    }

    /// The spectrum up to truncation `N ≥ 1`. Coefficients for `n ≥ 0` are
    /// computed, negative frequencies filled in by conjugate symmetry.
    pub fn spectrum(&self, truncation: usize) -> Result<Spectrum> {
        if truncation < 1 {
            return Err(Mod1Error::domain("spectrum truncation must be at least 1"));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * truncation + 1];
        for n in 0..=truncation {
            let c = self
                .fourier_coefficient(n as i64)
                .map_err(|e| e.at_coefficient(n as i64))?;
            coeffs[truncation + n] = c;
            coeffs[truncation - n] = c.conj();
        }
        Ok(Spectrum { truncation, coeffs })
    }

    /// Density of `-Y mod 1` when `Y` has this density: continuous densities
    /// become `x ↦ g(1-x)`, atoms move to `1-α`, and the spectrum conjugates.
    pub fn reflect(&self) -> CircleDensity {
        match self {
            CircleDensity::Atomic(a) => CircleDensity::Atomic(AtomicDensity {
                atoms: a
                    .atoms
                    .iter()
                    .map(|at| Atom {
                        location: frac(1.0 - at.location),
                        weight: at.weight,
                    })
                    .collect(),
            }),
            CircleDensity::Continuous(c) => {
                let eval = Arc::clone(&c.eval);
                let analytic = c.analytic.as_ref().map(|f| {
                    let f = Arc::clone(f);
                    Arc::new(move |n: i64| f(-n)) as CoeffFn
                });
                let breakpoints = {
                    let mut pts: Vec<f64> = c.breakpoints.iter().map(|&p| frac(1.0 - p)).collect();
                    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    pts.dedup();
                    pts
                };
                CircleDensity::Continuous(ContinuousDensity {
                    eval: Arc::new(move |x| eval(frac(1.0 - x))),
                    analytic,
                    breakpoints,
                })
            }
        }
    }

    /// Mass of `[lo, hi)` (with `0 ≤ lo ≤ hi ≤ 1`): atom weights in range, or
    /// quadrature for continuous densities.
    pub fn mass_in(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Mod1Error::domain(format!(
                "mass_in needs 0 <= lo <= hi <= 1, got [{lo}, {hi})"
            )));
        }
        match self {
            CircleDensity::Atomic(a) => Ok(a.mass_in(lo, hi)),
            CircleDensity::Continuous(c) => {
                let eval = &c.eval;
                let out = quadrature::integrate(
                    &|x| eval(x),
                    lo,
                    hi,
                    &c.breakpoints,
                    COEFFICIENT_TOL,
                    4000,
                )?;
                Ok(out.value)
            }
        }
    }

    /// Check the construction invariants that are not enforceable cheaply at
    /// build time: unit mass, and agreement of any closed-form coefficients
    /// with quadrature at a few frequencies.
    pub fn validate(&self) -> Result<()> {
        match self {
            CircleDensity::Atomic(_) => Ok(()), // fully checked at construction
            CircleDensity::Continuous(c) => {
                let mass = self.mass_in(0.0, 1.0)?;
                if (mass - 1.0).abs() > 1e-8 {
                    return Err(Mod1Error::domain(format!(
                        "density integrates to {mass}, expected 1"
                    )));
                }
                if c.analytic.is_some() {
                    for n in [1i64, 2, 5] {
                        let closed = self.fourier_coefficient(n)?;
                        let quad = c.coefficient_by_quadrature(n)?;
                        if (closed - quad).norm() > 1e-8 {
                            return Err(Mod1Error::domain(format!(
                                "closed-form coefficient at n = {n} disagrees with quadrature: {closed} vs {quad}"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// A finite table of Fourier coefficients `ĝ(n)` for `|n| ≤ N`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    truncation: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    /// Build from an explicit coefficient map.
    pub fn from_fn(truncation: usize, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let n = truncation as i64;
        let coeffs = (-n..=n).map(&mut f).collect();
        Spectrum { truncation, coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Coefficient at frequency `n`; panics when `|n|` exceeds the truncation.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        let t = self.truncation as i64;
        assert!(n.abs() <= t, "frequency {n} outside truncation {t}");
        self.coeffs[(n + t) as usize]
    }

    /// Iterate over `(n, ĝ(n))` pairs.
    pub fn coefficients(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let t = self.truncation as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - t, c))
    }

    /// The Fejér mean `Σ_{|n|≤N} (1 - |n|/N) ĝ(n) e^{2πinx}`.
    ///
    /// The imaginary part of the sum is asserted below 1e-8 (a violation
    /// means the table is not conjugate-symmetric) and then discarded.
    pub fn fejer_mean(&self, x: f64) -> Result<f64> {
        let n_max = self.truncation as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, c) in self.coefficients() {
            let weight = 1.0 - (n.abs() as f64) / n_max;
            if weight <= 0.0 {
                continue;
            }
            sum += weight * c * unit_phase(-(n as f64) * x);
        }
        if sum.im.abs() >= SYMMETRY_TOL {
            return Err(Mod1Error::NotConjugateSymmetric {
                imag: sum.im.abs(),
                x,
            });
        }
        Ok(sum.re)
    }

    /// The triangle-weighted coefficient mass off the zero frequency,
    /// `Σ_{n≠0} (1 - |n|/N) |ĝ(n)|`. This dominates the L¹ distance between
    /// the Fejér mean and the constant 1.
    pub fn fejer_bound_to_uniform(&self) -> f64 {
        let n_max = self.truncation as f64;
        self.coefficients()
            .filter(|&(n, _)| n != 0)
            .map(|(n, c)| (1.0 - (n.abs() as f64) / n_max) * c.norm())
            .sum()
    }

    /// Largest coefficient-wise distance to another spectrum of the same
    /// truncation; useful in tests.
    pub fn max_distance(&self, other: &Spectrum) -> f64 {
        assert_eq!(self.truncation, other.truncation);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A (possibly lazily generated) sequence of factor densities
/// `g_1, g_2, ...` feeding a sum-modulo-1 or product experiment.
///
/// Factors are 1-indexed.
pub trait DensitySequence: Sync {
    /// The `m`-th factor density.
    fn factor(&self, m: usize) -> CircleDensity;

    /// Fourier coefficient of the `m`-th factor; families with closed forms
    /// override this to stay exact where the density itself degenerates.
    fn factor_coefficient(&self, m: usize, n: i64) -> Result<Complex64> {
        self.factor(m).fourier_coefficient(n)
    }

    /// True when every factor is the same density; engines then collapse
    /// the per-factor product to a power.
    fn is_identical(&self) -> bool {
        false
    }
}

/// The same density repeated forever.
#[derive(Clone, Debug)]
pub struct Repeated(pub CircleDensity);

impl DensitySequence for Repeated {
    fn factor(&self, _m: usize) -> CircleDensity {
        self.0.clone()
    }

    fn factor_coefficient(&self, _m: usize, n: i64) -> Result<Complex64> {
        self.0.fourier_coefficient(n)
    }

    fn is_identical(&self) -> bool {
        true
    }
}

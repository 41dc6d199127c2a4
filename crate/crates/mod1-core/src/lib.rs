//! Sums of random variables modulo 1, made executable.
//!
//! The toolkit represents probability densities on the circle `[0,1)`,
//! propagates their Fourier spectra under convolution (sums mod 1 multiply
//! coefficients), tests the necessary-and-sufficient product criterion for
//! convergence to the uniform law, and connects the circle to first-digit
//! statistics: the digits of a product `X_1···X_M` follow the Benford law
//! exactly when `Σ log_B mantissa(X_m) mod 1` flattens out.
//!
//! Modules:
//! - [`density`]: circle densities, Fourier coefficients, Fejér means.
//! - [`convolution`]: spectra of sums mod 1, distance to uniform, verdicts.
//! - [`benford`]: mantissa and digit mathematics in arbitrary bases.
//! - [`families`]: box densities, the modified Pareto law, mantissa
//!   wraparound, and named factor families.
//! - [`discrete`]: point masses, weak pairings, the coset obstruction.
//! - [`montecarlo`]: seeded sampling experiments and spectral cross-checks.

pub mod benford;
pub mod convolution;
pub mod density;
pub mod discrete;
pub mod error;
pub mod families;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;

pub use benford::{
    benford_cdf, benford_digit_probabilities, digit_distribution_from_circle_density,
    distance_to_benford, mantissa, Base, DigitDistribution, DigitSource, DistanceMetric,
};
pub use convolution::{
    convergence_verdict, convolve_spectra, l1_distance_to_uniform, sum_mod1_spectrum,
    sum_mod1_spectrum_with_history, telescoping_product, ConvergenceVerdict, ConvolvedSpectrum,
    UniformDistance, VerdictKind,
};
pub use density::{
    Atom, AtomicDensity, CircleDensity, DensityKind, DensitySequence, Repeated, Spectrum,
};
pub use discrete::{
    detect_coset, detect_coset_exact, discrete_convergence_verdict, fejer_delta, support_report,
    weak_pairing, AtomSupportReport, TrigPolynomial, DEFAULT_MAX_COSET_ORDER,
};
pub use error::{Mod1Error, Result};
pub use families::{
    box_spectrum_coefficient, mantissa_pushforward_cdf, BoxDensity, FactorFamily, FamilySequence,
    ModifiedPareto, PositiveDensity,
};
pub use montecarlo::{
    simulate_product_digits, simulate_sum_mod1, spectral_vs_empirical_report, ExperimentConfig,
    SpectralEmpiricalReport, SumHistogram,
};
pub use rng::CounterRng;

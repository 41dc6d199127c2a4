use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum Mod1Error {
    /// Adaptive quadrature exhausted its refinement budget. Carries the error
    /// estimate that was actually achieved.
    #[error("quadrature did not converge: achieved error {achieved:.3e} exceeds tolerance {tolerance:.3e} after {panels} panels")]
    QuadratureDidNotConverge {
        achieved: f64,
        tolerance: f64,
        panels: usize,
    },

    /// Two spectra with different truncations were combined.
    #[error("spectrum truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    /// A Fejér sum came out with a non-negligible imaginary part, meaning the
    /// input spectrum was not conjugate-symmetric.
    #[error("spectrum is not conjugate-symmetric: |Im| = {imag:.3e} at x = {x}")]
    NotConjugateSymmetric { imag: f64, x: f64 },

    /// An argument was outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// An experiment or family descriptor could not be interpreted.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The chi-square statistic needs a sample count, so it is only defined
    /// for empirical digit distributions.
    #[error("chi-square distance requires an empirical digit distribution")]
    ChiSquareOnExact,

    /// The wraparound sum was not given enough decades to cover the declared
    /// support of the density.
    #[error("wraparound range with m_range = {m_range} does not cover the declared support; increase m_range to at least {needed}")]
    InsufficientRange { m_range: u32, needed: u32 },

    /// A factor of a discrete sequence carried an atom outside the declared
    /// finite support set.
    #[error("atom at {location} is outside the declared support set")]
    AtomOutsideSupport { location: f64 },

    /// A discrete operation was handed a continuous factor.
    #[error("factor {index} is not atomic")]
    NotAtomic { index: usize },

    /// Error while processing factor `index` (1-based) of a sequence.
    #[error("factor {index}: {source}")]
    Factor {
        index: usize,
        #[source]
        source: Box<Mod1Error>,
    },

    /// Error while computing the coefficient at frequency `n`.
    #[error("coefficient n = {n}: {source}")]
    Coefficient {
        n: i64,
        #[source]
        source: Box<Mod1Error>,
    },
}

impl Mod1Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Mod1Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Mod1Error::Config(msg.into())
    }

    pub(crate) fn at_factor(self, index: usize) -> Self {
        Mod1Error::Factor {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_coefficient(self, n: i64) -> Self {
        Mod1Error::Coefficient {
            n,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Mod1Error>;

use core::fmt;

/// Failure modes shared by every analytic and simulation routine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A result would exceed the representable `f64` range.
    Overflow,
    /// An iterative method stopped at its iteration cap.
    NonConvergence { what: &'static str, iterations: usize },
    /// An infinite series could not meet its tail bound within the term cap.
    /// `partial` is the truncated sum and `tail_bound` a rigorous bound on
    /// what was left out.
    TruncationFailure { terms: usize, partial: f64, tail_bound: f64 },
    /// Adaptive quadrature ran out of function evaluations.
    QuadratureBudget { evals: usize, estimate: f64, error: f64 },
    /// An argument lies outside the documented domain.
    Domain(&'static str),
    /// The configuration does not support the requested quantity.
    DegenerateConfig(&'static str),
    /// A scattering model violates its invariants.
    InvalidModel(&'static str),
    /// The implied Doppler spectrum is too far from nonnegative to clip;
    /// `min_relative` is the negative mass over the positive mass.
    InvalidSpectrum { min_relative: f64 },
    /// A sample variance vanished where a normalisation needs it.
    DegenerateVariance,
    /// No down-crossings were observed, so a duration is undefined.
    NoCrossings,
    /// A level is never left once entered (crossing rate is zero).
    InfiniteDuration,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Overflow => write!(f, "result overflows f64"),
            Error::NonConvergence { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations")
            }
            Error::TruncationFailure { terms, partial, tail_bound } => write!(
                f,
                "series truncated at {terms} terms (partial sum {partial:e}, tail bound {tail_bound:e})"
            ),
            Error::QuadratureBudget { evals, estimate, error } => write!(
                f,
                "quadrature budget of {evals} evaluations exhausted (estimate {estimate:e} +/- {error:e})"
            ),
            Error::Domain(msg) => write!(f, "argument out of domain: {msg}"),
            Error::DegenerateConfig(msg) => write!(f, "degenerate configuration: {msg}"),
            Error::InvalidModel(msg) => write!(f, "invalid scattering model: {msg}"),
            Error::InvalidSpectrum { min_relative } => write!(
                f,
                "spectral density has negative mass {min_relative:e} relative to its positive mass"
            ),
            Error::DegenerateVariance => write!(f, "sample variance is zero"),
            Error::NoCrossings => write!(f, "no down-crossings observed"),
            Error::InfiniteDuration => write!(f, "crossing rate is zero; duration is infinite"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

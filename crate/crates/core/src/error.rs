use thiserror::Error;

/// Errors raised by the power computations and their inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("support is empty")]
    EmptySupport,
    #[error("length mismatch: support has {support} labels, p has {p}, q has {q}")]
    LengthMismatch { support: usize, p: usize, q: usize },
    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),
    #[error("{which}[{index}] = {value} is negative or not finite")]
    NegativeMass {
        which: &'static str,
        index: usize,
        value: f64,
    },
    #[error("{which} sums to {sum}, not 1")]
    NotNormalized { which: &'static str, sum: f64 },
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("product would need more than {cap} atoms")]
    AtomExplosion { cap: usize },
    #[error("block length must be at least 1")]
    ZeroBlockLength,
    #[error("{name} = {value} lies outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("lambda = {0} is negative")]
    NegativeLambda(f64),
    #[error("Renyi order s = {0} is out of range")]
    OrderOutOfRange(f64),
    #[error("argument {0} is negative")]
    NegativeArgument(f64),
    #[error("inverse normal CDF undefined at p = {0}")]
    DomainError(f64),
    #[error("variance {0} is not positive")]
    DegenerateVariance(f64),
    #[error("log-likelihood ratio is +inf with positive P-mass {0}")]
    InfiniteLlr(f64),
    #[error("{0}")]
    OutOfRange(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange { name, value })
    }
}

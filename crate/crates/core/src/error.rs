use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no stable equilibrium at this operating point")]
    NoEquilibrium,

    #[error("mechanical frequency undefined: omega_M^2 = {0:e} <= 0")]
    NoMechanicalFrequency(f64),

    #[error("linear dynamics unstable: eigenvalue {re:e} {im:+e}i has non-negative real part")]
    Unstable { re: f64, im: f64 },

    #[error("time series too short: {got} samples, need at least {need}")]
    TooShort { got: usize, need: usize },

    #[error("no spectral peak above the noise floor (peak/median = {0:.2})")]
    NoPeak(f64),

    #[error("fit did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::Config(_) | Error::Io(_) | Error::Csv(_)
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

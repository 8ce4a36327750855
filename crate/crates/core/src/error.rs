use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time ordering violated: {0}")]
    TimeOrder(String),

    #[error("boundaries are not ordered: {0}")]
    UnorderedBoundaries(String),

    #[error("starting position {q0} is strictly inside the no-trade zone [{b_plus}, {b_minus}]")]
    StartsInsideZone { q0: f64, b_plus: f64, b_minus: f64 },

    #[error("stopping time falls after the close (no boundary contact on [{t}, {close}])")]
    StoppingAfterClose { t: f64, close: f64 },

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("quadrature did not converge: estimated error {error:e} after {intervals} intervals")]
    QuadratureFailure { error: f64, intervals: usize },

    #[error("explicit scheme is unstable: time step {dt:e} exceeds the stability bound {bound:e}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("P&L series has zero variance")]
    ZeroVariance,

    #[error("not enough data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure(cond: bool, name: &'static str, reason: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::param(name, reason()))
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    /// A sweep point failed; carries the applied flux of the offending sample.
    #[error("simulation failed at applied flux {phi} Φ0: {source}")]
    SweepPoint {
        phi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no threshold in [0, 0.5] Φ0 at bias ratio {bias_ratio}")]
    NoThreshold { bias_ratio: f64 },

    #[error("threshold unreachable: activity fraction {fraction} exceeds 1")]
    Unreachable { fraction: f64 },

    #[error("DI current {current} A exceeds saturation current {i_sat} A")]
    Saturation { current: f64, i_sat: f64 },

    #[error("design violates the flux cap: all-saturated flux {flux} Φ0, expected {phi_max} Φ0")]
    ConstraintViolation { flux: f64, phi_max: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

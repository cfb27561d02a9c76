use thiserror::Error;

/// Failures reported by the model, noise, analysis and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "quadrature did not converge: error estimate {error_estimate:e} on value {value:e} \
         after {evaluations} integrand evaluations"
    )]
    QuadratureNotConverged {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("user must be on the central perpendicular line, got x0 = {x0}, y0 = {y0}")]
    OffAxisUser { x0: f64, y0: f64 },

    #[error("SNR loss is undefined for a noise PSD of zero")]
    UndefinedSnrLoss,

    #[error("effective noise density is zero; capacity is unbounded")]
    ZeroNoise,

    #[error("no sign change of the utility on tau in [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

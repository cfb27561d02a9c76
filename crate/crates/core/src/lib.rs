//! Large intelligent surface receivers under hardware impairments.
//!
//! A user on the central perpendicular line of a square surface of side `2A`
//! transmits to a matched-filter receiver. Each surface element adds an
//! impairment whose variance grows with the distance from the center. This
//! crate evaluates the array gain, the effective noise density, capacity and
//! per-area utility of such a receiver, and includes a Monte-Carlo oracle that
//! simulates the receiver directly.
//!
//! Everything is generic over [`Scalar`]; the `f64` aliases below cover the
//! usual case.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod mc;
pub mod model;
pub mod noise;
pub mod quadrature;
pub mod roots;
pub mod scalar;

pub use analysis::{
    capacity, condition_boundary, high_snr_boundary, high_snr_threshold,
    negative_utility_condition, negative_utility_condition_high_snr, negative_utility_margin,
    noise_slope, split_capacity, split_noise_bound, turning_point, utility, utility_upper_bound,
    CapacityReport, SplitConfig, TurningPoint, NOISE_SLOPE_STEP, TURNING_POINT_TOL,
};
pub use error::{Error, Result};
pub use mc::{
    estimate_effective_noise, simulate_mf_trial, trial_rng, FieldGrid, McEstimate, McSettings,
    McTrial, PilotSymbol,
};
pub use model::{
    array_gain_closed, array_gain_quadrature, channel_gain, channel_power, dzeta_da, eta,
    ChannelSample, SurfaceGeometry, SystemConfig, UserPosition,
};
pub use noise::{
    disk_hwi_term, dn_da, effective_noise, effective_noise_disk, effective_noise_exact,
    effective_noise_small_area, snr_loss, snr_loss_low_beta, variance_profile, HwiModel,
    NoiseBreakdown, NoiseMethod,
};
pub use quadrature::{integrate_rect, QuadratureResult, QuadratureSettings, EVALUATION_BUDGET};
pub use roots::{bisect, Bisection, Outcome};
pub use scalar::{db_to_linear, linear_to_db, Scalar};

pub type Config = SystemConfig<f64>;
pub type Geometry = SurfaceGeometry<f64>;
pub type User = UserPosition<f64>;
pub type Hwi = HwiModel<f64>;
pub type Quad = QuadratureSettings<f64>;
pub type Noise = NoiseBreakdown<f64>;
pub type Report = CapacityReport<f64>;
pub type Split = SplitConfig<f64>;
pub type Turning = TurningPoint<f64>;
pub type Estimate = McEstimate<f64>;

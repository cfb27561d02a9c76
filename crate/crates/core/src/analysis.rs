//! Capacity, surface-area utility and its bound, the negative-utility
//! conditions, turning points, and the split into smaller units.
//!
//! Capacity is in nats: `C = ln(1 + ζP/Ñ)`. The utility is the slope with
//! respect to area, `γ = ∂C/∂𝒜 = (1/8A)·∂C/∂A` since `𝒜 = 4A²`, which
//! expands to
//!
//! ```text
//! γ = P / (8A(Ñ + ζP)) · (∂ζ/∂A − (ζ/Ñ)·∂Ñ/∂A)
//! ```
//!
//! With the disk noise form `∂Ñ/∂A` is analytic; with the quadrature-based
//! forms it is a central difference with step `A·1e-5`.

use crate::error::{invalid, Error, Result};
use crate::model::{array_gain_closed, dzeta_da, SurfaceGeometry, SystemConfig};
use crate::noise::{
    disk_hwi_slope, disk_hwi_term, effective_noise, HwiModel, NoiseBreakdown, NoiseMethod,
};
use crate::quadrature::QuadratureSettings;
use crate::roots::{bisect, Outcome};
use crate::scalar::Scalar;

/// Relative step of the central difference used for `∂Ñ/∂A`.
pub const NOISE_SLOPE_STEP: f64 = 1e-5;

/// Relative bracket width at which turning-point bisection stops.
pub const TURNING_POINT_TOL: f64 = 1e-4;

/// One operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport<T> {
    pub geometry: SurfaceGeometry<T>,
    pub zeta: T,
    pub noise: NoiseBreakdown<T>,
    /// `∂Ñ/∂A` used for the utility.
    pub noise_slope: T,
    /// `Ñ/N0`; infinite when `N0 = 0`.
    pub sigma: T,
    /// `ζP/Ñ`.
    pub snr: T,
    pub capacity_nat: T,
    pub utility: T,
    pub utility_upper_bound: T,
}

impl<T: Scalar> CapacityReport<T> {
    pub fn capacity_bits(&self) -> T {
        self.capacity_nat / T::LN_2()
    }

    /// `γ·𝒜`, close to one for small impairment-free surfaces at high SNR.
    pub fn utility_area(&self) -> T {
        self.utility * self.geometry.area()
    }
}

/// A surface of half length `A` split into `M` units of half length `A/M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig<T> {
    pub m_units: u32,
    pub parent: SurfaceGeometry<T>,
}

impl<T: Scalar> SplitConfig<T> {
    pub fn new(m_units: u32, parent: SurfaceGeometry<T>) -> Result<Self> {
        if m_units < 1 {
            return Err(invalid("m_units", "need at least one unit"));
        }
        Ok(Self { m_units, parent })
    }

    pub fn unit_half_length(&self) -> T {
        self.parent.half_length() / T::from_count(self.m_units as usize)
    }

    /// `M^{2β}`, the factor by which splitting divides the HWI term.
    pub fn suppression(&self, model: &HwiModel<T>) -> T {
        T::from_count(self.m_units as usize).powf(T::lit(2.0) * model.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint<T> {
    pub tau_star: T,
    /// `4·(τ*·z0)²`.
    pub area_star: T,
    pub method: NoiseMethod,
    pub converged: bool,
    /// The bracket the search started from.
    pub bracket: (T, T),
    pub iterations: usize,
}

fn assemble<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    noise: NoiseBreakdown<T>,
    noise_slope: T,
) -> Result<CapacityReport<T>> {
    let n_eff = noise.total;
    if !(n_eff > T::zero()) {
        return Err(Error::ZeroNoise);
    }
    let p = cfg.power_p;
    let a = geom.half_length();
    let tau = geom.tau();
    let zeta = array_gain_closed(tau);
    let received = zeta * p;
    let snr = received / n_eff;
    let bracket = dzeta_da(tau, cfg.z0) - zeta / n_eff * noise_slope;
    let utility = p / (T::lit(8.0) * a * (n_eff + received)) * bracket;
    let sigma = if cfg.n0 > T::zero() {
        n_eff / cfg.n0
    } else {
        T::infinity()
    };
    Ok(CapacityReport {
        geometry: *geom,
        zeta,
        noise,
        noise_slope,
        sigma,
        snr,
        capacity_nat: snr.ln_1p(),
        utility,
        utility_upper_bound: utility_upper_bound(tau, cfg.z0),
    })
}

/// `∂Ñ/∂A` for the chosen noise form.
pub fn noise_slope<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
    method: NoiseMethod,
    quad: &QuadratureSettings<T>,
) -> Result<T> {
    if model.is_impairment_free() {
        return Ok(T::zero());
    }
    match method {
        NoiseMethod::DiskClosedForm => Ok(disk_hwi_slope(
            cfg.power_p,
            cfg.z0,
            geom.half_length(),
            model,
        )),
        NoiseMethod::ExactQuadrature | NoiseMethod::SmallArea => {
            let a = geom.half_length();
            let h = a * T::lit(NOISE_SLOPE_STEP);
            let up = effective_noise(cfg, &geom.with_half_length(a + h)?, model, method, quad)?;
            let down = effective_noise(cfg, &geom.with_half_length(a - h)?, model, method, quad)?;
            Ok((up.hwi_term - down.hwi_term) / (T::lit(2.0) * h))
        }
    }
}

pub fn capacity<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
    method: NoiseMethod,
    quad: &QuadratureSettings<T>,
) -> Result<CapacityReport<T>> {
    let noise = effective_noise(cfg, geom, model, method, quad)?;
    let slope = noise_slope(cfg, geom, model, method, quad)?;
    assemble(cfg, geom, noise, slope)
}

pub fn utility<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
    method: NoiseMethod,
    quad: &QuadratureSettings<T>,
) -> Result<T> {
    capacity(cfg, geom, model, method, quad).map(|r| r.utility)
}

/// `γ0 = ζ'/(8Aζ)`, the utility with no impairment and vanishing `N0`.
/// Infinite at `τ = 0`.
pub fn utility_upper_bound<T: Scalar>(tau: T, z0: T) -> T {
    let t2 = tau * tau;
    let root = (T::lit(2.0) * t2 + T::one()).sqrt();
    let gain = (t2 / root).atan();
    if gain == T::zero() {
        return T::infinity();
    }
    T::one() / (T::lit(4.0) * z0 * z0 * gain * root * (t2 + T::one()))
}

/// `rhs − lhs` of the disk-form negative-utility condition; positive exactly
/// when the utility is negative.
pub fn negative_utility_margin<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
) -> T {
    let tau = geom.tau();
    let z0 = cfg.z0;
    let one = T::one();
    let t2 = tau * tau;
    let lhs = one / (T::PI() * z0 * (T::lit(2.0) * t2 + one).sqrt() * (t2 + one));
    if model.is_impairment_free() || model.beta == T::zero() {
        return -lhs;
    }
    let (alpha, beta, p) = (model.alpha, model.beta, cfg.power_p);
    let two_beta = T::lit(2.0) * beta;
    let scale = T::lit(4.0).powf(beta - one) * p * alpha;
    let zeta = array_gain_closed(tau);
    let rhs =
        zeta * beta * scale * tau.powf(two_beta - T::lit(2.0)) * z0.powf(two_beta - T::lit(3.0))
            / ((beta + one) * T::PI().powf(beta + one) * cfg.n0
                + scale * tau.powf(two_beta) * z0.powf(two_beta - T::lit(2.0)));
    rhs - lhs
}

/// True when enlarging the surface lowers capacity under the disk form.
pub fn negative_utility_condition<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
) -> bool {
    negative_utility_margin(cfg, geom, model) > T::zero()
}

/// `τ²/(√(2τ²+1)(τ²+1)·atan(τ²/√(2τ²+1)))`: 1 at `τ = 0`, falling to 0.
pub fn high_snr_threshold<T: Scalar>(tau: T) -> T {
    let t2 = tau * tau;
    if t2.is_infinite() {
        return T::zero();
    }
    let root = (T::lit(2.0) * t2 + T::one()).sqrt();
    let gain = (t2 / root).atan();
    if gain == T::zero() {
        return T::one();
    }
    t2 / (root * (t2 + T::one()) * gain)
}

/// The `N0 → 0` limit of [`negative_utility_condition`]: `β > threshold(τ)`.
pub fn negative_utility_condition_high_snr<T: Scalar>(tau: T, beta: T) -> bool {
    beta > high_snr_threshold(tau)
}

/// τ at which the disk-form negative-utility condition switches on.
pub fn condition_boundary<T: Scalar>(
    cfg: &SystemConfig<T>,
    model: &HwiModel<T>,
    bracket: (T, T),
) -> Result<Option<T>> {
    let margin = |tau: T| -> Result<T> {
        let g = SurfaceGeometry::from_tau(tau, cfg.z0)?;
        Ok(negative_utility_margin(cfg, &g, model))
    };
    Ok(bisect(margin, bracket.0, bracket.1, T::lit(1e-10))?
        .root()
        .map(|b| b.root))
}

/// τ at which `β = threshold(τ)`; exists only for `0 < β < 1`.
pub fn high_snr_boundary<T: Scalar>(beta: T, bracket: (T, T)) -> Result<Option<T>> {
    Ok(bisect(
        |tau: T| Ok(beta - high_snr_threshold(tau)),
        bracket.0,
        bracket.1,
        T::lit(1e-10),
    )?
    .root()
    .map(|b| b.root))
}

/// Root of `γ(τ) = 0` on the given τ bracket.
pub fn turning_point<T: Scalar>(
    cfg: &SystemConfig<T>,
    model: &HwiModel<T>,
    method: NoiseMethod,
    bracket: (T, T),
    quad: &QuadratureSettings<T>,
) -> Result<TurningPoint<T>> {
    let (lo, hi) = bracket;
    if !(lo > T::zero() && lo < hi) {
        return Err(invalid(
            "bracket",
            format!("need 0 < tau_lo < tau_hi, got ({lo}, {hi})"),
        ));
    }
    let gamma = |tau: T| -> Result<T> {
        let g = SurfaceGeometry::from_tau(tau, cfg.z0)?;
        utility(cfg, &g, model, method, quad)
    };
    let hit = match bisect(gamma, lo, hi, T::lit(TURNING_POINT_TOL))? {
        Outcome::Root(hit) => hit,
        Outcome::NoSignChange { f_lo, f_hi } => {
            return Err(Error::NoSignChange {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
                f_lo: f_lo.as_f64(),
                f_hi: f_hi.as_f64(),
            })
        }
    };
    let side = hit.root * cfg.z0;
    Ok(TurningPoint {
        tau_star: hit.root,
        area_star: T::lit(4.0) * side * side,
        method,
        converged: hit.converged,
        bracket,
        iterations: hit.iterations,
    })
}

/// Upper bound on the effective noise after splitting:
/// `N0 + Ñ_s(A)/M^{2β}` with the disk-form `Ñ_s`.
pub fn split_noise_bound<T: Scalar>(
    cfg: &SystemConfig<T>,
    split: &SplitConfig<T>,
    model: &HwiModel<T>,
) -> NoiseBreakdown<T> {
    let single = disk_hwi_term(cfg.power_p, cfg.z0, split.parent.half_length(), model);
    NoiseBreakdown::new(
        cfg.n0,
        single / split.suppression(model),
        NoiseMethod::DiskClosedForm,
    )
}

/// Capacity of the split surface. The received power is that of the unsplit
/// surface; only the noise changes.
pub fn split_capacity<T: Scalar>(
    cfg: &SystemConfig<T>,
    split: &SplitConfig<T>,
    model: &HwiModel<T>,
) -> Result<CapacityReport<T>> {
    let noise = split_noise_bound(cfg, split, model);
    let slope = disk_hwi_slope(cfg.power_p, cfg.z0, split.parent.half_length(), model)
        / split.suppression(model);
    assemble(cfg, &split.parent, noise, slope)
}

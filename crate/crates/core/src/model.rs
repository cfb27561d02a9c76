//! Geometry, line-of-sight channel and array gain of a square surface.
//!
//! The surface occupies `[-A, A]²` in the plane `z = 0`; the user sits at
//! `(x0, y0, z0)` with `z0 > 0`. Closed forms assume the user is on the
//! central perpendicular line (`x0 = y0 = 0`).

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_rect, QuadratureResult, QuadratureSettings};
use crate::scalar::{db_to_linear, Scalar};

/// Global physical parameters shared by every operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig<T> {
    /// Linear transmit power.
    pub power_p: T,
    /// Spatial noise PSD, power per m².
    pub n0: T,
    /// Perpendicular distance of the user from the surface, m.
    pub z0: T,
    /// Carrier wavelength, m. Only the field phase depends on it.
    pub wavelength: T,
}

impl<T: Scalar> SystemConfig<T> {
    pub fn new(power_p: T, n0: T, z0: T, wavelength: T) -> Result<Self> {
        if !(power_p > T::zero() && power_p.is_finite()) {
            return Err(invalid(
                "power_p",
                format!("must be positive and finite, got {power_p}"),
            ));
        }
        if !(n0 >= T::zero() && n0.is_finite()) {
            return Err(invalid(
                "n0",
                format!("must be non-negative and finite, got {n0}"),
            ));
        }
        if !(z0 > T::zero() && z0.is_finite()) {
            return Err(invalid(
                "z0",
                format!("must be positive and finite, got {z0}"),
            ));
        }
        if !(wavelength > T::zero() && wavelength.is_finite()) {
            return Err(invalid(
                "wavelength",
                format!("must be positive, got {wavelength}"),
            ));
        }
        Ok(Self {
            power_p,
            n0,
            z0,
            wavelength,
        })
    }

    /// Same as [`SystemConfig::new`] with the power given in dB.
    pub fn from_db(power_db: T, n0: T, z0: T, wavelength: T) -> Result<Self> {
        Self::new(db_to_linear(power_db), n0, z0, wavelength)
    }

    /// Builds a configuration for an explicit user position. Only users on
    /// the central perpendicular line are accepted.
    pub fn for_user(power_p: T, n0: T, user: UserPosition<T>, wavelength: T) -> Result<Self> {
        user.ensure_on_axis()?;
        Self::new(power_p, n0, user.z0, wavelength)
    }

    /// The on-axis user this configuration describes.
    pub fn user(&self) -> UserPosition<T> {
        UserPosition::on_axis(self.z0)
    }
}

/// Square surface `[-A, A]²` with its derived normalized length and area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceGeometry<T> {
    half_length_a: T,
    z0: T,
    tau: T,
    area: T,
}

impl<T: Scalar> SurfaceGeometry<T> {
    pub fn new(half_length_a: T, z0: T) -> Result<Self> {
        if !(half_length_a > T::zero() && half_length_a.is_finite()) {
            return Err(invalid(
                "half_length_a",
                format!("must be positive and finite, got {half_length_a}"),
            ));
        }
        if !(z0 > T::zero()) {
            return Err(invalid("z0", format!("must be positive, got {z0}")));
        }
        Ok(Self {
            half_length_a,
            z0,
            tau: half_length_a / z0,
            area: T::lit(4.0) * half_length_a * half_length_a,
        })
    }

    pub fn from_tau(tau: T, z0: T) -> Result<Self> {
        Self::new(tau * z0, z0)
    }

    pub fn from_area(area: T, z0: T) -> Result<Self> {
        if !(area > T::zero()) {
            return Err(invalid("area", format!("must be positive, got {area}")));
        }
        Self::new(area.sqrt() / T::lit(2.0), z0)
    }

    /// Half side length `A`, m.
    pub fn half_length(&self) -> T {
        self.half_length_a
    }

    /// `A / z0`.
    pub fn tau(&self) -> T {
        self.tau
    }

    /// `4A²`, m².
    pub fn area(&self) -> T {
        self.area
    }

    /// The z0 this geometry was normalized against.
    pub fn z0(&self) -> T {
        self.z0
    }

    /// Same normalization distance, different half length.
    pub fn with_half_length(&self, half_length_a: T) -> Result<Self> {
        Self::new(half_length_a, self.z0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserPosition<T> {
    pub x0: T,
    pub y0: T,
    pub z0: T,
}

impl<T: Scalar> UserPosition<T> {
    pub fn new(x0: T, y0: T, z0: T) -> Result<Self> {
        if !(z0 > T::zero() && z0.is_finite()) {
            return Err(invalid("z0", format!("must be positive, got {z0}")));
        }
        if !(x0.is_finite() && y0.is_finite()) {
            return Err(invalid("user position", "coordinates must be finite"));
        }
        Ok(Self { x0, y0, z0 })
    }

    pub fn on_axis(z0: T) -> Self {
        Self {
            x0: T::zero(),
            y0: T::zero(),
            z0,
        }
    }

    pub fn is_on_axis(&self) -> bool {
        self.x0 == T::zero() && self.y0 == T::zero()
    }

    pub fn ensure_on_axis(&self) -> Result<()> {
        if self.is_on_axis() {
            Ok(())
        } else {
            Err(Error::OffAxisUser {
                x0: self.x0.as_f64(),
                y0: self.y0.as_f64(),
            })
        }
    }
}

/// Channel value at one surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSample<T> {
    pub amplitude: T,
    /// Radians in `[0, 2π)`.
    pub phase: T,
    /// `|s|²`, gain density per m².
    pub power: T,
}

impl<T: Scalar> ChannelSample<T> {
    pub fn to_complex(&self) -> num_complex::Complex<T> {
        num_complex::Complex::from_polar(self.amplitude, self.phase)
    }
}

/// Squared distance between the surface point `(x, y, 0)` and the user.
#[inline]
pub fn eta<T: Scalar>(x: T, y: T, user: &UserPosition<T>) -> T {
    let dx = user.x0 - x;
    let dy = user.y0 - y;
    dx * dx + dy * dy + user.z0 * user.z0
}

/// `s(x, y) = ½·√(z0/π)·η^{-3/4}·exp(−2πj√η/λ)`.
pub fn channel_gain<T: Scalar>(
    x: T,
    y: T,
    user: &UserPosition<T>,
    wavelength: T,
) -> ChannelSample<T> {
    let e = eta(x, y, user);
    let amplitude = T::lit(0.5) * (user.z0 / T::PI()).sqrt() * e.powf(T::lit(-0.75));
    let two_pi = T::TAU();
    let raw = -two_pi * e.sqrt() / wavelength;
    let phase = raw - two_pi * (raw / two_pi).floor();
    // Rounding can land exactly on 2π for tiny negative inputs.
    let phase = if phase >= two_pi { T::zero() } else { phase };
    ChannelSample {
        amplitude,
        phase,
        power: amplitude * amplitude,
    }
}

/// `|s|²` without building the full sample: `(z0/4π)·η^{-3/2}`.
#[inline]
pub fn channel_power<T: Scalar>(x: T, y: T, user: &UserPosition<T>) -> T {
    user.z0 / (T::lit(4.0) * T::PI()) * eta(x, y, user).powf(T::lit(-1.5))
}

/// Array gain of a centered user, `(1/π)·atan(τ²/√(2τ²+1))`.
pub fn array_gain_closed<T: Scalar>(tau: T) -> T {
    let t2 = tau * tau;
    if t2.is_infinite() {
        return T::lit(0.5);
    }
    (t2 / (T::lit(2.0) * t2 + T::one()).sqrt()).atan() / T::PI()
}

/// Array gain by direct integration of `(z0/4π)·η^{-3/2}` over `[-A, A]²`.
/// Works for any user position.
pub fn array_gain_quadrature<T: Scalar>(
    geom: &SurfaceGeometry<T>,
    user: &UserPosition<T>,
    quad: &QuadratureSettings<T>,
) -> Result<QuadratureResult<T>> {
    let a = geom.half_length();
    let settings = quad.relative_only();
    let raw = integrate_rect(
        |x, y| eta(x, y, user).powf(T::lit(-1.5)),
        -a,
        a,
        -a,
        a,
        &settings,
    )?;
    let scale = user.z0 / (T::lit(4.0) * T::PI());
    let result = QuadratureResult {
        value: raw.value * scale,
        error_estimate: raw.error_estimate * scale,
        ..raw
    };
    if !result.converged {
        result.into_value()?;
    }
    Ok(result)
}

/// `∂ζ/∂A = 2τ / (π z0 √(2τ²+1) (τ²+1))`.
pub fn dzeta_da<T: Scalar>(tau: T, z0: T) -> T {
    let t2 = tau * tau;
    T::lit(2.0) * tau / (T::PI() * z0 * (T::lit(2.0) * t2 + T::one()).sqrt() * (t2 + T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn user(z0: f64) -> UserPosition<f64> {
        UserPosition::on_axis(z0)
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(0.0, 0.0, &user(2.0)), 4.0);
        assert_eq!(eta(1.0, 1.0, &user(2.0)), 6.0);
        assert!((eta(3.0, 4.0, &user(1e-4)) - 25.000_000_01).abs() < 1e-12);
    }

    #[test]
    fn channel_at_center() {
        for z0 in [0.5, 2.0, 7.0] {
            let s = channel_gain(0.0, 0.0, &user(z0), 0.1);
            assert!((s.power - 1.0 / (4.0 * PI * z0 * z0)).abs() < 1e-15);
            assert_eq!(s.power, s.amplitude * s.amplitude);
        }
    }

    #[test]
    fn channel_phase_full_cycle() {
        // λ = 2√η ⇒ phase = −π, reduced to π; λ = √η ⇒ −2π, reduced to 0.
        let u = user(2.0);
        let root_eta = 6.0_f64.sqrt();
        let s = channel_gain(1.0, 1.0, &u, root_eta);
        assert!(s.phase.abs() < 1e-12 || (s.phase - 2.0 * PI).abs() < 1e-12);
        assert!(s.phase >= 0.0 && s.phase < 2.0 * PI);
        let s = channel_gain(1.0, 1.0, &u, 2.0 * root_eta);
        assert!((s.phase - PI).abs() < 1e-12);
    }

    #[test]
    fn channel_power_off_center() {
        // (2/4π)·6^{-3/2}, evaluated independently.
        let s = channel_gain(1.0, 1.0, &user(2.0), 0.1);
        assert!(
            (s.power - 0.010_829_122_239_357).abs() < 1e-12,
            "{}",
            s.power
        );
        assert!((s.power - channel_power(1.0, 1.0, &user(2.0))).abs() < 1e-17);
    }

    #[test]
    fn closed_array_gain_values() {
        assert_eq!(array_gain_closed(0.0_f64), 0.0);
        assert!((array_gain_closed(1.0_f64) - 1.0 / 6.0).abs() < 1e-15);
        assert!((array_gain_closed(1e12_f64) - 0.5).abs() < 1e-11);
        assert_eq!(array_gain_closed(f64::INFINITY), 0.5);
        assert!((array_gain_closed(1.0_f32) - 1.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn quadrature_array_gain_at_unit_tau() {
        let quad = QuadratureSettings::new(1e-12, 1e-10, 20).unwrap();
        let geom = SurfaceGeometry::from_tau(1.0, 3.0).unwrap();
        let z = array_gain_quadrature(&geom, &user(3.0), &quad).unwrap();
        assert!((z.value - 1.0 / 6.0).abs() < 1e-8);
    }

    #[test]
    fn quadrature_array_gain_small_surface() {
        let z0 = 2.0;
        let geom = SurfaceGeometry::from_tau(1e-6, z0).unwrap();
        let z = array_gain_quadrature(&geom, &user(z0), &QuadratureSettings::default()).unwrap();
        let expected = 1e-12 / PI;
        assert!((z.value - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn off_axis_user_gets_less() {
        let z0 = 2.0;
        let geom = SurfaceGeometry::new(1.5, z0).unwrap();
        let quad = QuadratureSettings::default();
        let on = array_gain_quadrature(&geom, &user(z0), &quad)
            .unwrap()
            .value;
        let off_user = UserPosition::new(0.75, 0.0, z0).unwrap();
        let off = array_gain_quadrature(&geom, &off_user, &quad)
            .unwrap()
            .value;
        // Brute-force midpoint sum as an independent check of the off-axis value.
        let n = 600;
        let h = 3.0 / n as f64;
        let mut riemann = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = -1.5 + (i as f64 + 0.5) * h;
                let y = -1.5 + (j as f64 + 0.5) * h;
                riemann += channel_power(x, y, &off_user) * h * h;
            }
        }
        assert!(off < on);
        assert!((off - riemann).abs() < 1e-6, "{off} vs {riemann}");
    }

    #[test]
    fn integrated_channel_power_is_array_gain() {
        let z0 = 1.5;
        let u = user(z0);
        let geom = SurfaceGeometry::new(2.0, z0).unwrap();
        let quad = QuadratureSettings::default().relative_only();
        let energy = integrate_rect(
            |x, y| channel_gain(x, y, &u, 0.1).power,
            -2.0,
            2.0,
            -2.0,
            2.0,
            &quad,
        )
        .unwrap()
        .into_value()
        .unwrap();
        let zeta = array_gain_closed(geom.tau());
        assert!((energy - zeta).abs() < 1e-9 * zeta);
    }

    #[test]
    fn geometry_invariants() {
        let g = SurfaceGeometry::new(0.75, 3.0).unwrap();
        assert_eq!(g.tau(), 0.25);
        assert_eq!(g.area(), 4.0 * 0.75 * 0.75);
        assert!((SurfaceGeometry::from_area(2.66_f64, 2.0).unwrap().tau() - 0.407_76).abs() < 1e-4);
        assert!(SurfaceGeometry::new(0.0, 1.0).is_err());
        assert!(SurfaceGeometry::new(1.0, 0.0).is_err());
        assert!(SurfaceGeometry::from_area(-1.0, 1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(1.0, 0.0, 1.0, 0.1).is_ok());
        assert!(SystemConfig::new(0.0, 1.0, 1.0, 0.1).is_err());
        assert!(SystemConfig::new(1.0, -1.0, 1.0, 0.1).is_err());
        assert!(SystemConfig::new(1.0, 1.0, 0.0, 0.1).is_err());
        assert!(SystemConfig::new(1.0, 1.0, 1.0, 0.0).is_err());
        let c = SystemConfig::from_db(20.0, 1.0, 2.0, 0.1).unwrap();
        assert_eq!(c.power_p, 100.0);
        let off = UserPosition::new(0.1, 0.0, 2.0).unwrap();
        assert!(matches!(
            SystemConfig::for_user(1.0, 1.0, off, 0.1),
            Err(Error::OffAxisUser { .. })
        ));
        assert!(SystemConfig::for_user(1.0, 1.0, user(2.0), 0.1).is_ok());
    }

    #[test]
    fn dzeta_da_values() {
        assert_eq!(dzeta_da(0.0, 1.0), 0.0);
        let expected = 1.0 / (PI * 3.0_f64.sqrt());
        assert!((dzeta_da(1.0, 1.0) - expected).abs() < 1e-15);
        assert!((expected - 0.183_776).abs() < 1e-6);
    }

    #[test]
    fn dzeta_da_matches_finite_difference_at_large_tau() {
        let (tau, z0): (f64, f64) = (10.0, 4.0);
        let a = tau * z0;
        let h = a * 1e-6;
        let fd = (array_gain_closed((a + h) / z0) - array_gain_closed((a - h) / z0)) / (2.0 * h);
        assert!(((dzeta_da(tau, z0) - fd) / fd).abs() < 1e-6);
    }

    #[test]
    fn quadrature_agrees_with_closed_form_across_scales() {
        let quad = QuadratureSettings::default();
        for tau in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let z0 = 2.0;
            let geom = SurfaceGeometry::from_tau(tau, z0).unwrap();
            let q = array_gain_quadrature(&geom, &user(z0), &quad)
                .unwrap()
                .value;
            let c = array_gain_closed(tau);
            assert!(
                (q - c).abs() <= 10.0 * quad.tolerance_for(c),
                "tau {tau}: {q} vs {c}"
            );
        }
    }

    proptest! {
        #[test]
        fn closed_gain_monotone_and_bounded(t in 1e-3..1e3_f64, dt in 1e-3..10.0_f64) {
            let a = array_gain_closed(t);
            let b = array_gain_closed(t + dt);
            prop_assert!(a > 0.0 && a < b && b < 0.5);
        }

        #[test]
        fn dzeta_da_matches_central_difference(tau in 1e-2..1e2_f64, z0 in 0.1..20.0_f64) {
            let a = tau * z0;
            let h = a * 1e-6;
            let fd = (array_gain_closed((a + h) / z0) - array_gain_closed((a - h) / z0)) / (2.0 * h);
            let an = dzeta_da(tau, z0);
            prop_assert!(((an - fd) / an).abs() <= 1e-6);
        }

        #[test]
        fn phase_is_canonical(x in -10.0..10.0_f64, y in -10.0..10.0_f64, lambda in 1e-3..1.0_f64) {
            let s = channel_gain(x, y, &user(3.0), lambda);
            prop_assert!(s.phase >= 0.0 && s.phase < 2.0 * PI);
            prop_assert!((s.power - channel_power(x, y, &user(3.0))).abs() <= 1e-15 * s.power);
        }
    }
}

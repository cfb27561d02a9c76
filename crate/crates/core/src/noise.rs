//! Hardware-impairment variance profile and the effective noise density seen
//! after matched filtering.
//!
//! The impairment at distance `r` from the surface center has variance
//! density `f(r) = α·r^{2β}`. Three evaluations of the effective noise are
//! provided, from exact to most approximate:
//!
//! * [`effective_noise_exact`]: ratio of the two surface integrals
//!   `∬ f(r)·η⁻³` and `∬ η^{-3/2}`, both by quadrature;
//! * [`effective_noise_small_area`]: the `A ≪ z0` limit, one integral left;
//! * [`effective_noise_disk`]: the square replaced by the equal-area disk of
//!   radius `2A/√π`, fully closed form.
//!
//! The integrals are taken over the quadrant `[0, A]²`. Both integrands are
//! even in `x` and `y`, so the ratio equals the full-square ratio and the
//! `1/A²` prefactor of the small-area form is the quadrant area.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::model::{SurfaceGeometry, SystemConfig};
use crate::quadrature::{integrate_rect, QuadratureSettings};
use crate::scalar::Scalar;

/// Parameters of `f(r) = α·r^{2β}`. `α = 0` is the impairment-free system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwiModel<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> HwiModel<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha >= T::zero() && alpha.is_finite()) {
            return Err(invalid(
                "alpha",
                format!("must be non-negative, got {alpha}"),
            ));
        }
        if !(beta >= T::zero() && beta.is_finite()) {
            return Err(invalid("beta", format!("must be non-negative, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn none() -> Self {
        Self {
            alpha: T::zero(),
            beta: T::zero(),
        }
    }

    pub fn is_impairment_free(&self) -> bool {
        self.alpha == T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseMethod {
    ExactQuadrature,
    SmallArea,
    DiskClosedForm,
}

impl NoiseMethod {
    pub const ALL: [NoiseMethod; 3] = [
        NoiseMethod::ExactQuadrature,
        NoiseMethod::SmallArea,
        NoiseMethod::DiskClosedForm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseMethod::ExactQuadrature => "exact",
            NoiseMethod::SmallArea => "small-area",
            NoiseMethod::DiskClosedForm => "disk",
        }
    }
}

impl fmt::Display for NoiseMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-quadrature" => Ok(NoiseMethod::ExactQuadrature),
            "small-area" => Ok(NoiseMethod::SmallArea),
            "disk" | "disk-closed-form" => Ok(NoiseMethod::DiskClosedForm),
            other => Err(invalid(
                "noise method",
                format!("expected exact, small-area or disk, got {other:?}"),
            )),
        }
    }
}

/// `total = n0 + hwi_term`, tagged with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBreakdown<T> {
    pub n0: T,
    pub hwi_term: T,
    pub total: T,
    pub method: NoiseMethod,
}

impl<T: Scalar> NoiseBreakdown<T> {
    pub fn new(n0: T, hwi_term: T, method: NoiseMethod) -> Self {
        Self {
            n0,
            hwi_term,
            total: n0 + hwi_term,
            method,
        }
    }
}

/// `α·r^{2β}`.
pub fn variance_profile<T: Scalar>(r: T, model: &HwiModel<T>) -> T {
    if model.is_impairment_free() {
        return T::zero();
    }
    model.alpha * r.powf(T::lit(2.0) * model.beta)
}

// r^{2β} written on r² so no square root is taken.
#[inline]
fn radial_power<T: Scalar>(r2: T, beta: T) -> T {
    if beta == T::zero() {
        T::one()
    } else {
        r2.powf(beta)
    }
}

/// `∬ r^{2β}·η⁻³ / ∬ η^{-3/2}` over `[lo, hi]²` for an on-axis user.
pub(crate) fn exact_ratio<T: Scalar>(
    z0: T,
    beta: T,
    lo: T,
    hi: T,
    quad: &QuadratureSettings<T>,
) -> Result<T> {
    let settings = quad.relative_only();
    let z2 = z0 * z0;
    let numerator = integrate_rect(
        |x, y| {
            let r2 = x * x + y * y;
            let eta = r2 + z2;
            radial_power(r2, beta) / (eta * eta * eta)
        },
        lo,
        hi,
        lo,
        hi,
        &settings,
    )?
    .into_value()?;
    let denominator = integrate_rect(
        |x, y| (x * x + y * y + z2).powf(T::lit(-1.5)),
        lo,
        hi,
        lo,
        hi,
        &settings,
    )?
    .into_value()?;
    Ok(numerator / denominator)
}

/// Effective noise density from the full matched-filter integrals.
pub fn effective_noise_exact<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
    quad: &QuadratureSettings<T>,
) -> Result<NoiseBreakdown<T>> {
    let method = NoiseMethod::ExactQuadrature;
    if model.is_impairment_free() {
        return Ok(NoiseBreakdown::new(cfg.n0, T::zero(), method));
    }
    let ratio = exact_ratio(cfg.z0, model.beta, T::zero(), geom.half_length(), quad)?;
    let prefactor = cfg.power_p * cfg.z0 * model.alpha / (T::lit(4.0) * T::PI());
    Ok(NoiseBreakdown::new(cfg.n0, prefactor * ratio, method))
}

/// `A ≪ z0` limit: `η` is replaced by `z0²` in both integrals.
pub fn effective_noise_small_area<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
    quad: &QuadratureSettings<T>,
) -> Result<NoiseBreakdown<T>> {
    let method = NoiseMethod::SmallArea;
    if model.is_impairment_free() {
        return Ok(NoiseBreakdown::new(cfg.n0, T::zero(), method));
    }
    let a = geom.half_length();
    let beta = model.beta;
    let inner = integrate_rect(
        |x, y| radial_power(x * x + y * y, beta),
        T::zero(),
        a,
        T::zero(),
        a,
        &quad.relative_only(),
    )?
    .into_value()?;
    let prefactor = cfg.power_p * model.alpha / (T::lit(4.0) * T::PI() * cfg.z0 * cfg.z0 * a * a);
    Ok(NoiseBreakdown::new(cfg.n0, prefactor * inner, method))
}

/// HWI contribution of the equal-area disk approximation,
/// `4^{β−1}·P·α·A^{2β} / ((β+1)·z0²·π^{β+1})`.
pub fn disk_hwi_term<T: Scalar>(power_p: T, z0: T, half_length: T, model: &HwiModel<T>) -> T {
    if model.is_impairment_free() {
        return T::zero();
    }
    let beta = model.beta;
    let one = T::one();
    T::lit(4.0).powf(beta - one)
        * power_p
        * model.alpha
        * radial_power(half_length * half_length, beta)
        / ((beta + one) * z0 * z0 * T::PI().powf(beta + one))
}

pub fn effective_noise_disk<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
) -> NoiseBreakdown<T> {
    let hwi = disk_hwi_term(cfg.power_p, cfg.z0, geom.half_length(), model);
    NoiseBreakdown::new(cfg.n0, hwi, NoiseMethod::DiskClosedForm)
}

pub fn effective_noise<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
    method: NoiseMethod,
    quad: &QuadratureSettings<T>,
) -> Result<NoiseBreakdown<T>> {
    match method {
        NoiseMethod::ExactQuadrature => effective_noise_exact(cfg, geom, model, quad),
        NoiseMethod::SmallArea => effective_noise_small_area(cfg, geom, model, quad),
        NoiseMethod::DiskClosedForm => Ok(effective_noise_disk(cfg, geom, model)),
    }
}

/// Received-SNR loss `σ = Ñ/N0`.
pub fn snr_loss<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
    method: NoiseMethod,
    quad: &QuadratureSettings<T>,
) -> Result<T> {
    if cfg.n0 == T::zero() {
        return Err(Error::UndefinedSnrLoss);
    }
    let noise = effective_noise(cfg, geom, model, method, quad)?;
    Ok(noise.total / cfg.n0)
}

/// The `β ≪ 1` shortcut `σ ≈ 1 + P·α·A^{2β} / (4π·z0²·N0)`.
pub fn snr_loss_low_beta<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
) -> Result<T> {
    if cfg.n0 == T::zero() {
        return Err(Error::UndefinedSnrLoss);
    }
    if model.is_impairment_free() {
        return Ok(T::one());
    }
    let a = geom.half_length();
    let hwi = cfg.power_p * model.alpha * radial_power(a * a, model.beta)
        / (T::lit(4.0) * T::PI() * cfg.z0 * cfg.z0 * cfg.n0);
    Ok(T::one() + hwi)
}

/// `∂Ñ/∂A` of the disk form, `β·4^{β−½}·P·α·A^{2β−1} / ((β+1)·z0²·π^{β+1})`.
pub fn dn_da<T: Scalar>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
) -> T {
    disk_hwi_slope(cfg.power_p, cfg.z0, geom.half_length(), model)
}

pub(crate) fn disk_hwi_slope<T: Scalar>(
    power_p: T,
    z0: T,
    half_length: T,
    model: &HwiModel<T>,
) -> T {
    let beta = model.beta;
    if model.is_impairment_free() || beta == T::zero() {
        return T::zero();
    }
    let one = T::one();
    beta * T::lit(4.0).powf(beta - T::lit(0.5))
        * power_p
        * model.alpha
        * half_length.powf(T::lit(2.0) * beta - one)
        / ((beta + one) * z0 * z0 * T::PI().powf(beta + one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cfg(p: f64, n0: f64, z0: f64) -> SystemConfig<f64> {
        SystemConfig::new(p, n0, z0, 0.1).unwrap()
    }

    fn geom(a: f64, z0: f64) -> SurfaceGeometry<f64> {
        SurfaceGeometry::new(a, z0).unwrap()
    }

    fn hwi(alpha: f64, beta: f64) -> HwiModel<f64> {
        HwiModel::new(alpha, beta).unwrap()
    }

    fn quad() -> QuadratureSettings<f64> {
        QuadratureSettings::default()
    }

    // Midpoint rule on the quadrant, used as an independent oracle.
    fn riemann_hwi(c: &SystemConfig<f64>, a: f64, m: &HwiModel<f64>, n: usize) -> f64 {
        let h = a / n as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let x = (i as f64 + 0.5) * h;
                let y = (j as f64 + 0.5) * h;
                let r = (x * x + y * y).sqrt();
                let eta = x * x + y * y + c.z0 * c.z0;
                num += m.alpha * r.powf(2.0 * m.beta) * eta.powi(-3);
                den += eta.powf(-1.5);
            }
        }
        c.power_p * c.z0 / (4.0 * PI) * num / den
    }

    #[test]
    fn variance_profile_values() {
        assert_eq!(variance_profile(3.0, &HwiModel::none()), 0.0);
        assert_eq!(variance_profile(1.0, &hwi(0.7, 2.5)), 0.7);
        assert_eq!(variance_profile(2.0, &hwi(2.0, 3.0)), 128.0);
        assert_eq!(variance_profile(0.0, &hwi(2.0, 0.0)), 2.0);
    }

    #[test]
    fn model_validation() {
        assert!(HwiModel::new(-1.0, 0.0).is_err());
        assert!(HwiModel::new(1.0, -0.5).is_err());
        assert!(HwiModel::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in NoiseMethod::ALL {
            assert_eq!(m.as_str().parse::<NoiseMethod>().unwrap(), m);
        }
        assert!("trapezoid".parse::<NoiseMethod>().is_err());
    }

    #[test]
    fn impairment_free_is_n0_for_every_method() {
        let c = cfg(100.0, 1.3, 2.0);
        let g = geom(0.8, 2.0);
        for m in NoiseMethod::ALL {
            let n = effective_noise(&c, &g, &HwiModel::none(), m, &quad()).unwrap();
            assert_eq!(n.hwi_term, 0.0);
            assert_eq!(n.total, 1.3);
            assert_eq!(n.method, m);
        }
    }

    #[test]
    fn exact_beta_zero_small_surface() {
        let (z0, p, alpha) = (2.0, 100.0, 1.5);
        let c = cfg(p, 1.0, z0);
        let n =
            effective_noise_exact(&c, &geom(z0 / 100.0, z0), &hwi(alpha, 0.0), &quad()).unwrap();
        let expected = p * alpha / (4.0 * PI * z0 * z0);
        assert!((n.hwi_term - expected).abs() < 1e-3 * expected);
        assert_eq!(n.total, n.n0 + n.hwi_term);
    }

    #[test]
    fn exact_matches_riemann_oracle() {
        let c = cfg(100.0, 1.0, 2.0);
        let m = hwi(2.0, 3.0);
        for a in [0.2, 0.8, 1.6] {
            let exact = effective_noise_exact(&c, &geom(a, 2.0), &m, &quad())
                .unwrap()
                .hwi_term;
            let coarse = riemann_hwi(&c, a, &m, 200);
            let fine = riemann_hwi(&c, a, &m, 400);
            let spread = (fine - coarse).abs();
            assert!(
                (exact - fine).abs() <= spread + 1e-12 * exact,
                "A={a}: {exact} {coarse} {fine}"
            );
        }
    }

    #[test]
    fn exact_monotone_for_steep_profiles() {
        let c = cfg(100.0, 1.0, 2.0);
        for beta in [2.0, 3.0] {
            let m = hwi(2.0, beta);
            let mut last = 0.0;
            for k in 0..40 {
                let tau = 0.01 * 1.2_f64.powi(k);
                let n = effective_noise_exact(
                    &c,
                    &SurfaceGeometry::from_tau(tau, 2.0).unwrap(),
                    &m,
                    &quad(),
                )
                .unwrap()
                .total;
                assert!(n >= last, "beta {beta}, tau {tau}: {n} < {last}");
                assert!(n >= c.n0);
                last = n;
            }
        }
    }

    #[test]
    fn exact_flat_profile_falls_with_area() {
        // With β = 0 the far surface collects relatively less impairment than
        // signal, so the exact density decreases in A; only the disk and
        // small-area forms are nondecreasing for every β.
        let c = cfg(100.0, 1.0, 2.0);
        let m = hwi(2.0, 0.0);
        let small = effective_noise_exact(&c, &geom(0.2, 2.0), &m, &quad())
            .unwrap()
            .total;
        let large = effective_noise_exact(&c, &geom(4.0, 2.0), &m, &quad())
            .unwrap()
            .total;
        assert!(large < small);
    }

    #[test]
    fn quadrant_and_full_square_ratios_agree() {
        let q = quad();
        for (z0, beta, a) in [(2.0, 3.0, 0.8), (1.0, 0.5, 2.0), (4.0, 1.0, 0.3)] {
            let quadrant = exact_ratio(z0, beta, 0.0, a, &q).unwrap();
            let full = exact_ratio(z0, beta, -a, a, &q).unwrap();
            assert!(
                (quadrant - full).abs() <= 1e-7 * full,
                "{quadrant} vs {full}"
            );
        }
    }

    #[test]
    fn small_area_closed_cases() {
        let (p, z0, alpha) = (100.0, 4.0, 0.5);
        let c = cfg(p, 1.0, z0);
        let n = effective_noise_small_area(&c, &geom(0.37, z0), &hwi(alpha, 0.0), &quad()).unwrap();
        let flat = p * alpha / (4.0 * PI * z0 * z0);
        assert!((n.hwi_term - flat).abs() < 1e-14 * flat);
        let n = effective_noise_small_area(&c, &geom(1.0, z0), &hwi(alpha, 1.0), &quad()).unwrap();
        let quadratic = p * alpha / (6.0 * PI * z0 * z0);
        assert!((n.hwi_term - quadratic).abs() < 1e-13 * quadratic);
    }

    #[test]
    fn small_area_close_to_disk() {
        let c = cfg(100.0, 1.0, 4.0);
        let g = geom(0.5, 4.0);
        let m = hwi(1.0, 2.0);
        let sa = effective_noise_small_area(&c, &g, &m, &quad())
            .unwrap()
            .hwi_term;
        let disk = effective_noise_disk(&c, &g, &m).hwi_term;
        // Analytic moment ∬(x²+y²)² over [0, a]² = 28a⁶/45.
        let expected_sa = 100.0 / (4.0 * PI * 16.0 * 0.25) * 28.0 * 0.5_f64.powi(6) / 45.0;
        assert!((sa - expected_sa).abs() < 1e-12 * expected_sa);
        // The square keeps more mass far from the center than the equal-area disk.
        let shape = 84.0 * PI * PI / 720.0;
        assert!((sa / disk - shape).abs() < 1e-12);
    }

    #[test]
    fn disk_values() {
        let c = cfg(100.0, 1.0, 4.0);
        let n = effective_noise_disk(&c, &geom(1.0, 4.0), &hwi(1.0, 1.0));
        assert!((n.total - (1.0 + 100.0 / (32.0 * PI * PI))).abs() < 1e-14);
        assert!((n.total - 1.316_629).abs() < 1e-6);
        assert_eq!(
            effective_noise_disk(&c, &geom(1.0, 4.0), &HwiModel::none()).total,
            1.0
        );
        let flat = effective_noise_disk(&c, &geom(0.3, 4.0), &hwi(2.0, 0.0)).hwi_term;
        let sa = effective_noise_small_area(&c, &geom(0.3, 4.0), &hwi(2.0, 0.0), &quad())
            .unwrap()
            .hwi_term;
        assert!((flat - 200.0 / (4.0 * PI * 16.0)).abs() < 1e-14);
        assert!((flat - sa).abs() < 1e-13);
    }

    #[test]
    fn snr_loss_cases() {
        let c = cfg(100.0, 1.0, 4.0);
        let g = geom(0.6, 4.0);
        for m in NoiseMethod::ALL {
            assert_eq!(
                snr_loss(&c, &g, &HwiModel::none(), m, &quad()).unwrap(),
                1.0
            );
        }
        let flat = hwi(1.5, 0.0);
        let shortcut = snr_loss_low_beta(&c, &g, &flat).unwrap();
        let disk = snr_loss(&c, &g, &flat, NoiseMethod::DiskClosedForm, &quad()).unwrap();
        assert!((shortcut - disk).abs() < 1e-14);
        let silent = cfg(100.0, 0.0, 4.0);
        assert_eq!(
            snr_loss(&silent, &g, &flat, NoiseMethod::DiskClosedForm, &quad()),
            Err(Error::UndefinedSnrLoss)
        );
        assert_eq!(
            snr_loss_low_beta(&silent, &g, &flat),
            Err(Error::UndefinedSnrLoss)
        );
    }

    #[test]
    fn snr_loss_increases_with_area() {
        let c = cfg(100.0, 1.0, 4.0);
        for (alpha, beta) in [(0.5, 0.5), (1.0, 1.0), (2.0, 2.0), (2.0, 3.0)] {
            let m = hwi(alpha, beta);
            for method in NoiseMethod::ALL {
                let mut last = 1.0;
                for k in 1..=30 {
                    let a = 0.05 * k as f64;
                    let s = snr_loss(&c, &geom(a, 4.0), &m, method, &quad()).unwrap();
                    assert!(s > last, "{method} alpha {alpha} beta {beta} A {a}");
                    last = s;
                }
            }
        }
    }

    #[test]
    fn slope_cases() {
        let c = cfg(100.0, 1.0, 2.0);
        assert_eq!(dn_da(&c, &geom(1e-9, 2.0), &hwi(3.0, 0.0)), 0.0);
        assert_eq!(dn_da(&c, &geom(1.0, 2.0), &HwiModel::none()), 0.0);
        let g = geom(1.0, 2.0);
        let m = hwi(2.0, 3.0);
        let h = 1e-6;
        let up = effective_noise_disk(&c, &geom(1.0 + h, 2.0), &m).total;
        let down = effective_noise_disk(&c, &geom(1.0 - h, 2.0), &m).total;
        let fd = (up - down) / (2.0 * h);
        let an = dn_da(&c, &g, &m);
        assert!(((an - fd) / an).abs() < 1e-8);
    }

    #[test]
    fn disk_error_vanishes_for_small_surfaces() {
        let c = cfg(100.0, 1.0, 2.0);
        let m = hwi(2.0, 1.0);
        let mut last = f64::INFINITY;
        for tau in [0.2, 0.1, 0.05, 0.02] {
            let g = SurfaceGeometry::from_tau(tau, 2.0).unwrap();
            let exact = effective_noise_exact(&c, &g, &m, &quad()).unwrap().total;
            let disk = effective_noise_disk(&c, &g, &m).total;
            let rel = (exact - disk).abs() / exact;
            assert!(rel < last, "tau {tau}: {rel} !< {last}");
            last = rel;
        }
    }

    proptest! {
        #[test]
        fn noise_never_below_n0(
            a in 0.01..5.0_f64,
            z0 in 0.5..5.0_f64,
            alpha in 0.0..5.0_f64,
            beta in 0.0..4.0_f64,
        ) {
            let c = cfg(100.0, 0.7, z0);
            let g = geom(a, z0);
            let m = hwi(alpha, beta);
            for method in NoiseMethod::ALL {
                let n = effective_noise(&c, &g, &m, method, &quad()).unwrap();
                prop_assert!(n.total >= c.n0 && n.hwi_term >= 0.0);
                prop_assert_eq!(n.total, n.n0 + n.hwi_term);
            }
        }

        #[test]
        fn disk_nondecreasing_and_slope_matches(
            a in 0.05..5.0_f64,
            z0 in 0.5..5.0_f64,
            alpha in 0.1..5.0_f64,
            beta in 0.1..4.0_f64,
        ) {
            let c = cfg(100.0, 1.0, z0);
            let m = hwi(alpha, beta);
            let h = a * 1e-6;
            let up = effective_noise_disk(&c, &geom(a + h, z0), &m).hwi_term;
            let down = effective_noise_disk(&c, &geom(a - h, z0), &m).hwi_term;
            prop_assert!(up >= down);
            let fd = (up - down) / (2.0 * h);
            let an = dn_da(&c, &geom(a, z0), &m);
            prop_assert!(((an - fd) / an).abs() <= 1e-6);
        }
    }
}

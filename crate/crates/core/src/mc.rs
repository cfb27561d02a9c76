//! Monte-Carlo matched-filter receiver on a sampled surface.
//!
//! The surface `[-A, A]²` is cut into `resolution²` square cells with the
//! channel sampled at the cell centers. Both the impairment `h` and the noise
//! `n` are spatially white, so on a cell of area `Δ` they become independent
//! circularly-symmetric complex Gaussians with variances `f(r)/Δ` and `N0/Δ`.
//! One trial forms the Riemann-sum analog of the normalized matched filter
//!
//! ```text
//! r̃ = (1/√ζ_g) Σ s*·(√P(1+h)·s·a + n)·Δ = √(P·ζ_g)·a + w̃/√ζ_g
//! ```
//!
//! where `ζ_g = Σ|s|²Δ`. The variance of `w̃/√ζ_g` over trials estimates the
//! effective noise density.
//!
//! Trial `k` draws from a ChaCha8 stream keyed by `(seed, k)`, so estimates
//! do not depend on how trials are scheduled across threads.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::model::{channel_gain, SurfaceGeometry, SystemConfig};
use crate::noise::{variance_profile, HwiModel};
use crate::scalar::Scalar;

/// Transmitted symbol `a`, always of unit power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PilotSymbol {
    /// `a = 1`.
    #[default]
    Fixed,
    /// `a = e^{jθ}` with θ uniform per trial.
    RandomPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub trials: usize,
    pub seed: u64,
    /// Grid points per axis.
    pub resolution: usize,
    pub symbol: PilotSymbol,
}

impl McSettings {
    pub fn new(trials: usize, seed: u64, resolution: usize) -> Result<Self> {
        let settings = Self {
            trials,
            seed,
            resolution,
            symbol: PilotSymbol::Fixed,
        };
        settings.validate()?;
        Ok(settings)
    }

    pub fn with_symbol(self, symbol: PilotSymbol) -> Self {
        Self { symbol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(invalid("trials", "need at least two trials for a variance"));
        }
        if self.resolution < 2 {
            return Err(invalid("resolution", "need at least two points per axis"));
        }
        Ok(())
    }
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 2024,
            resolution: 256,
            symbol: PilotSymbol::Fixed,
        }
    }
}

/// Sampled surface with the per-cell matched-filter weights of one
/// operating point.
#[derive(Debug, Clone)]
pub struct FieldGrid<T> {
    resolution: usize,
    half_length: T,
    cell_area: T,
    /// Channel at the cell centers, row-major in `y` then `x`.
    samples: Vec<Complex<T>>,
    zeta_grid: T,
    signal_amplitude: T,
    // √P·|s|²·√(fΔ) / √(2ζ_g): maps a standard complex normal to the
    // impairment contribution of the cell.
    hwi_weights: Vec<T>,
    // s*·√(N0Δ) / √(2ζ_g).
    awgn_weights: Vec<Complex<T>>,
}

impl<T: Scalar> FieldGrid<T> {
    pub fn new(
        cfg: &SystemConfig<T>,
        geom: &SurfaceGeometry<T>,
        model: &HwiModel<T>,
        resolution: usize,
    ) -> Result<Self> {
        if resolution < 2 {
            return Err(invalid("resolution", "need at least two points per axis"));
        }
        let user = cfg.user();
        let a = geom.half_length();
        let n = T::from_count(resolution);
        let step = T::lit(2.0) * a / n;
        let cell_area = step * step;
        let half = T::lit(0.5);

        let mut samples = Vec::with_capacity(resolution * resolution);
        let mut radii = Vec::with_capacity(resolution * resolution);
        for j in 0..resolution {
            let y = -a + (T::from_count(j) + half) * step;
            for i in 0..resolution {
                let x = -a + (T::from_count(i) + half) * step;
                samples.push(channel_gain(x, y, &user, cfg.wavelength).to_complex());
                radii.push((x * x + y * y).sqrt());
            }
        }
        let zeta_grid: T = samples.iter().map(|s| s.norm_sqr() * cell_area).sum();
        let norm = (T::lit(2.0) * zeta_grid).sqrt();
        let hwi_weights = samples
            .iter()
            .zip(&radii)
            .map(|(s, &r)| {
                let f = variance_profile(r, model);
                cfg.power_p.sqrt() * s.norm_sqr() * (f * cell_area).sqrt() / norm
            })
            .collect();
        let noise_scale = (cfg.n0 * cell_area).sqrt() / norm;
        let awgn_weights = samples.iter().map(|s| s.conj() * noise_scale).collect();
        Ok(Self {
            resolution,
            half_length: a,
            cell_area,
            samples,
            zeta_grid,
            signal_amplitude: (cfg.power_p * zeta_grid).sqrt(),
            hwi_weights,
            awgn_weights,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cell_area(&self) -> T {
        self.cell_area
    }

    pub fn half_length(&self) -> T {
        self.half_length
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    /// Riemann-sum array gain `Σ|s|²Δ`.
    pub fn zeta_grid(&self) -> T {
        self.zeta_grid
    }

    /// Noise density the trials converge to on this grid:
    /// `N0 + P·Σ f|s|⁴Δ / ζ_g`.
    pub fn discretized_noise_density(&self) -> T {
        let two = T::lit(2.0);
        let hwi: T = self.hwi_weights.iter().map(|w| two * *w * *w).sum();
        let awgn: T = self.awgn_weights.iter().map(|w| two * w.norm_sqr()).sum();
        hwi + awgn
    }
}

/// Matched-filter output of one trial, split into its three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McTrial<T> {
    /// `√(P·ζ_g)·a`.
    pub signal: Complex<T>,
    /// Impairment part of `w̃/√ζ_g`.
    pub hwi_noise: Complex<T>,
    /// Thermal-noise part of `w̃/√ζ_g`.
    pub awgn_noise: Complex<T>,
}

impl<T: Scalar> McTrial<T> {
    pub fn noise(&self) -> Complex<T> {
        self.hwi_noise + self.awgn_noise
    }
}

fn standard_complex<T, R>(rng: &mut R) -> Complex<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let re: T = StandardNormal.sample(rng);
    let im: T = StandardNormal.sample(rng);
    Complex::new(re, im)
}

/// Draws one symbol and one realization of impairment and noise on every
/// cell, and returns the matched-filter output.
pub fn simulate_mf_trial<T, R>(grid: &FieldGrid<T>, symbol: PilotSymbol, rng: &mut R) -> McTrial<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let a = match symbol {
        PilotSymbol::Fixed => Complex::new(T::one(), T::zero()),
        PilotSymbol::RandomPhase => {
            let theta = T::TAU() * T::lit(rng.random::<f64>());
            Complex::from_polar(T::one(), theta)
        }
    };
    let mut hwi = Complex::new(T::zero(), T::zero());
    let mut awgn = Complex::new(T::zero(), T::zero());
    for (w_h, w_n) in grid.hwi_weights.iter().zip(&grid.awgn_weights) {
        let h: Complex<T> = standard_complex(rng);
        let n: Complex<T> = standard_complex(rng);
        hwi += h * *w_h;
        awgn += *w_n * n;
    }
    McTrial {
        signal: a * grid.signal_amplitude,
        hwi_noise: a * hwi,
        awgn_noise: awgn,
    }
}

/// The generator used for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T> {
    /// Sample variance of the noise component.
    pub noise_density_estimate: T,
    /// Standard error of the estimate, from the spread of `|w|²`.
    pub standard_error: T,
    /// Mean of `|signal|²`, i.e. `P·ζ_g`.
    pub signal_power_estimate: T,
    pub mean_signal: Complex<T>,
    /// Mean of `Re(hwi·conj(awgn))`, zero for independent terms.
    pub cross_covariance: T,
    pub cross_covariance_se: T,
    pub zeta_grid: T,
    /// What the estimate converges to as trials grow, for this grid.
    pub discretized_density: T,
    pub trials: usize,
}

fn mean_and_se<T: Scalar>(values: impl Iterator<Item = T> + Clone, n: usize) -> (T, T) {
    let count = T::from_count(n);
    let mean = values.clone().sum::<T>() / count;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<T>() / T::from_count(n - 1);
    (mean, (var / count).sqrt())
}

pub fn estimate_effective_noise<T>(
    cfg: &SystemConfig<T>,
    geom: &SurfaceGeometry<T>,
    model: &HwiModel<T>,
    settings: &McSettings,
) -> Result<McEstimate<T>>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
{
    settings.validate()?;
    let grid = FieldGrid::new(cfg, geom, model, settings.resolution)?;
    let trials: Vec<McTrial<T>> = (0..settings.trials)
        .into_par_iter()
        .map(|k| simulate_mf_trial(&grid, settings.symbol, &mut trial_rng(settings.seed, k)))
        .collect();

    let n = trials.len();
    let count = T::from_count(n);
    let noise_mean = trials.iter().map(McTrial::noise).sum::<Complex<T>>() / count;
    let noise_density_estimate = trials
        .iter()
        .map(|t| (t.noise() - noise_mean).norm_sqr())
        .sum::<T>()
        / T::from_count(n - 1);
    let (_, standard_error) = mean_and_se(trials.iter().map(|t| t.noise().norm_sqr()), n);
    let (cross_covariance, cross_covariance_se) = mean_and_se(
        trials
            .iter()
            .map(|t| (t.hwi_noise * t.awgn_noise.conj()).re),
        n,
    );
    let signal_power_estimate = trials.iter().map(|t| t.signal.norm_sqr()).sum::<T>() / count;
    let mean_signal = trials.iter().map(|t| t.signal).sum::<Complex<T>>() / count;

    Ok(McEstimate {
        noise_density_estimate,
        standard_error,
        signal_power_estimate,
        mean_signal,
        cross_covariance,
        cross_covariance_se,
        zeta_grid: grid.zeta_grid(),
        discretized_density: grid.discretized_noise_density(),
        trials: n,
    })
}

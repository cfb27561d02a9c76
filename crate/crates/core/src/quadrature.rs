//! Globally adaptive cubature over axis-aligned rectangles.
//!
//! Each region is integrated with the tensor product of the 15-point
//! Gauss–Kronrod rule; the embedded 7-point Gauss tensor rule on the same
//! nodes supplies the error estimate `|K − G|`. The region with the largest
//! estimate is split into four quadrants until the summed estimate meets
//! `max(abs_tol, rel_tol·|value|)`, every remaining region hits `max_depth`,
//! or the evaluation budget runs out.
//!
//! Everything is sequential and ordered: the same integrand and settings give
//! a bit-identical result.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Hard cap on integrand calls for a single integral.
pub const EVALUATION_BUDGET: usize = 20_000_000;

#[allow(clippy::excessive_precision)]
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the Kronrod nodes with odd index (1, 3, 5, 7).
#[allow(clippy::excessive_precision)]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Error control for [`integrate_rect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Maximum number of quadrant splits along any branch.
    pub max_depth: u32,
}

impl<T: Scalar> Default for QuadratureSettings<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-8),
            max_depth: 20,
        }
    }
}

impl<T: Scalar> QuadratureSettings<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_depth: u32) -> Result<Self> {
        let settings = Self {
            abs_tol,
            rel_tol,
            max_depth,
        };
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= T::zero() && self.rel_tol >= T::zero()) {
            return Err(invalid(
                "quadrature tolerance",
                "tolerances must be non-negative",
            ));
        }
        if !(self.abs_tol > T::zero() || self.rel_tol > T::zero()) {
            return Err(invalid(
                "quadrature tolerance",
                "at least one of abs_tol, rel_tol must be positive",
            ));
        }
        if self.max_depth < 1 {
            return Err(invalid("max_depth", "must be at least 1"));
        }
        Ok(())
    }

    /// Drops the absolute floor so that integrals of strictly positive
    /// integrands are resolved to `rel_tol` whatever their magnitude.
    /// No-op when `rel_tol` is zero.
    pub fn relative_only(self) -> Self {
        if self.rel_tol > T::zero() {
            Self {
                abs_tol: T::zero(),
                ..self
            }
        } else {
            self
        }
    }

    pub fn tolerance_for(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: Scalar> QuadratureResult<T> {
    /// The value, or a numerical-failure error carrying the achieved estimate.
    pub fn into_value(self) -> Result<T> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::QuadratureNotConverged {
                value: self.value.as_f64(),
                error_estimate: self.error_estimate.as_f64(),
                evaluations: self.evaluations,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Region<T> {
    id: u64,
    x: (T, T),
    y: (T, T),
    depth: u32,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Region<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Region<T> {}

impl<T: Scalar> PartialOrd for Region<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Region<T> {
    // Max-heap on error; among equal errors the older region wins.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Rule<T> {
    nodes: [T; 15],
    kronrod: [T; 15],
    // Zero on the Kronrod-only nodes.
    gauss: [T; 15],
}

impl<T: Scalar> Rule<T> {
    fn new() -> Self {
        let mut nodes = [T::zero(); 15];
        let mut kronrod = [T::zero(); 15];
        let mut gauss = [T::zero(); 15];
        for i in 0..7 {
            let x = T::lit(KRONROD_NODES[i]);
            let wk = T::lit(KRONROD_WEIGHTS[i]);
            let wg = if i % 2 == 1 {
                T::lit(GAUSS_WEIGHTS[i / 2])
            } else {
                T::zero()
            };
            nodes[i] = -x;
            nodes[14 - i] = x;
            kronrod[i] = wk;
            kronrod[14 - i] = wk;
            gauss[i] = wg;
            gauss[14 - i] = wg;
        }
        kronrod[7] = T::lit(KRONROD_WEIGHTS[7]);
        gauss[7] = T::lit(GAUSS_WEIGHTS[3]);
        Self {
            nodes,
            kronrod,
            gauss,
        }
    }

    fn apply<F: Fn(T, T) -> T>(&self, f: &F, x: (T, T), y: (T, T)) -> (T, T) {
        let half = T::lit(0.5);
        let (cx, hx) = ((x.0 + x.1) * half, (x.1 - x.0) * half);
        let (cy, hy) = ((y.0 + y.1) * half, (y.1 - y.0) * half);
        let mut k = T::zero();
        let mut g = T::zero();
        for i in 0..15 {
            let px = cx + hx * self.nodes[i];
            let mut k_row = T::zero();
            let mut g_row = T::zero();
            for j in 0..15 {
                let v = f(px, cy + hy * self.nodes[j]);
                k_row += self.kronrod[j] * v;
                g_row += self.gauss[j] * v;
            }
            k += self.kronrod[i] * k_row;
            g += self.gauss[i] * g_row;
        }
        let jac = hx * hy;
        (k * jac, ((k - g) * jac).abs())
    }
}

const EVALS_PER_REGION: usize = 225;

/// Integrates `f` over `[x_lo, x_hi] × [y_lo, y_hi]`.
///
/// Non-convergence is not an error here: the result comes back with
/// `converged = false` and the caller decides (see
/// [`QuadratureResult::into_value`]). Invalid bounds or settings are errors.
pub fn integrate_rect<T, F>(
    f: F,
    x_lo: T,
    x_hi: T,
    y_lo: T,
    y_hi: T,
    settings: &QuadratureSettings<T>,
) -> Result<QuadratureResult<T>>
where
    T: Scalar,
    F: Fn(T, T) -> T,
{
    settings.validate()?;
    if !(x_lo < x_hi) || !(y_lo < y_hi) {
        return Err(invalid(
            "integration bounds",
            format!("need x_lo < x_hi and y_lo < y_hi, got [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}]"),
        ));
    }
    if !(x_lo.is_finite() && x_hi.is_finite() && y_lo.is_finite() && y_hi.is_finite()) {
        return Err(invalid("integration bounds", "bounds must be finite"));
    }

    let rule = Rule::new();
    let mut next_id = 0_u64;
    let mut make = |x: (T, T), y: (T, T), depth: u32| {
        let (value, error) = rule.apply(&f, x, y);
        let id = next_id;
        next_id += 1;
        Region {
            id,
            x,
            y,
            depth,
            value,
            error,
        }
    };

    let root = make((x_lo, x_hi), (y_lo, y_hi), 0);
    let mut evaluations = EVALS_PER_REGION;
    let mut total_value = root.value;
    let mut total_error = root.error;
    let mut heap = BinaryHeap::new();
    let mut exhausted: Vec<Region<T>> = Vec::new();
    let mut finite = root.value.is_finite() && root.error.is_finite();
    heap.push(root);

    while finite {
        if total_error <= settings.tolerance_for(total_value) {
            // Running sums drift; confirm against a fresh ordered sum.
            let (v, e) = ordered_sums(heap.iter().chain(exhausted.iter()));
            total_value = v;
            total_error = e;
            if total_error <= settings.tolerance_for(total_value) {
                break;
            }
        }
        if evaluations + 4 * EVALS_PER_REGION > EVALUATION_BUDGET {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= settings.max_depth {
            exhausted.push(worst);
            continue;
        }
        let half = T::lit(0.5);
        let xm = (worst.x.0 + worst.x.1) * half;
        let ym = (worst.y.0 + worst.y.1) * half;
        let depth = worst.depth + 1;
        total_value -= worst.value;
        total_error -= worst.error;
        for (x, y) in [
            ((worst.x.0, xm), (worst.y.0, ym)),
            ((xm, worst.x.1), (worst.y.0, ym)),
            ((worst.x.0, xm), (ym, worst.y.1)),
            ((xm, worst.x.1), (ym, worst.y.1)),
        ] {
            let child = make(x, y, depth);
            finite &= child.value.is_finite() && child.error.is_finite();
            total_value += child.value;
            total_error += child.error;
            heap.push(child);
        }
        evaluations += 4 * EVALS_PER_REGION;
    }

    let (value, error_estimate) = ordered_sums(heap.iter().chain(exhausted.iter()));
    let converged = finite && error_estimate <= settings.tolerance_for(value);
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
        converged,
    })
}

fn ordered_sums<'a, T: Scalar>(regions: impl Iterator<Item = &'a Region<T>>) -> (T, T) {
    let mut all: Vec<&Region<T>> = regions.collect();
    all.sort_unstable_by_key(|r| r.id);
    all.iter().fold((T::zero(), T::zero()), |(v, e), r| {
        (v + r.value, e + r.error)
    })
}

//! Bracketed bisection. Derivative-free, so it tolerates the small jitter of
//! utilities built from quadrature and finite differences.

use crate::error::Result;
use crate::scalar::Scalar;

pub const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection<T> {
    pub root: T,
    /// Final bracket.
    pub lo: T,
    pub hi: T,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<T> {
    Root(Bisection<T>),
    /// `f(lo)` and `f(hi)` share a sign; nothing was bisected.
    NoSignChange {
        f_lo: T,
        f_hi: T,
    },
}

impl<T> Outcome<T> {
    pub fn root(self) -> Option<Bisection<T>> {
        match self {
            Outcome::Root(b) => Some(b),
            Outcome::NoSignChange { .. } => None,
        }
    }
}

/// Bisects `f` on `[lo, hi]` until the bracket width is at most
/// `rel_tol·|midpoint|`. Fallible evaluations abort the search.
pub fn bisect<T, F>(mut f: F, lo: T, hi: T, rel_tol: T) -> Result<Outcome<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == T::zero() {
        return Ok(Outcome::Root(exact_root(lo)));
    }
    if f_hi == T::zero() {
        return Ok(Outcome::Root(exact_root(hi)));
    }
    if !(f_lo.signum() * f_hi.signum() < T::zero()) {
        return Ok(Outcome::NoSignChange { f_lo, f_hi });
    }

    let half = T::lit(0.5);
    let (mut a, mut b, mut fa) = (lo, hi, f_lo);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_BISECTIONS {
        let mid = (a + b) * half;
        if (b - a).abs() <= rel_tol * mid.abs() {
            converged = true;
            break;
        }
        let fm = f(mid)?;
        iterations += 1;
        if fm == T::zero() {
            a = mid;
            b = mid;
            converged = true;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(Outcome::Root(Bisection {
        root: (a + b) * half,
        lo: a,
        hi: b,
        iterations,
        converged,
    }))
}

fn exact_root<T: Scalar>(x: T) -> Bisection<T> {
    Bisection {
        root: x,
        lo: x,
        hi: x,
        iterations: 0,
        converged: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let hit = bisect(|x: f64| Ok(x * x - 2.0), 1.0, 2.0, 1e-12)
            .unwrap()
            .root()
            .unwrap();
        assert!(hit.converged);
        assert!((hit.root - 2.0_f64.sqrt()).abs() < 1e-11);
        assert!(hit.lo <= hit.root && hit.root <= hit.hi);
    }

    #[test]
    fn reports_missing_sign_change() {
        let out = bisect(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-6).unwrap();
        assert_eq!(
            out,
            Outcome::NoSignChange {
                f_lo: 2.0,
                f_hi: 2.0
            }
        );
    }

    #[test]
    fn endpoint_root() {
        let hit = bisect(|x: f64| Ok(x - 1.0), 1.0, 3.0, 1e-6)
            .unwrap()
            .root()
            .unwrap();
        assert_eq!(hit.root, 1.0);
        assert_eq!(hit.iterations, 0);
    }

    #[test]
    fn decreasing_function() {
        let hit = bisect(|x: f64| Ok(0.3827 - x), 0.0, 1.0, 1e-4)
            .unwrap()
            .root()
            .unwrap();
        assert!((hit.root - 0.3827).abs() < 1e-4 * 0.3827);
    }

    #[test]
    fn evaluation_errors_propagate() {
        let r = bisect(|_: f64| Err(crate::error::Error::ZeroNoise), 0.0, 1.0, 1e-6);
        assert!(r.is_err());
    }
}

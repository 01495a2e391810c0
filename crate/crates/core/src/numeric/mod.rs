//! Scalar numerical building blocks: root bracketing, one-dimensional
//! maximization, quadrature rules, Chebyshev surrogates and concave envelopes.

mod chebyshev;
mod gauss_hermite;
mod hull;
mod kronrod;

pub use chebyshev::Chebyshev;
pub use gauss_hermite::{gauss_hermite, GaussHermite};
pub use hull::{upper_concave_envelope, ConcaveEnvelope};
pub use kronrod::{integrate_adaptive, Integral};

/// Argument tolerance used by every bisection in the crate.
pub const BISECTION_TOL: f64 = 1e-10;
/// Iteration cap for bisections.
pub const BISECTION_MAX_ITER: usize = 200;
/// Default argument tolerance of golden-section searches.
pub const GOLDEN_TOL: f64 = 1e-10;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Numerically stable `log(sum(exp(x)))`. Returns `-inf` for an empty input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let xs: Vec<f64> = values.into_iter().collect();
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Bisection on a monotone predicate.
///
/// `below(x)` must be true on `[lo, x*)` and false on `(x*, hi]`. Iterates
/// until the bracket is narrower than `tol` (absolute) or the iteration cap is
/// hit, and returns the midpoint of the final bracket.
pub fn bisect<P: FnMut(f64) -> bool>(mut below: P, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Result of a one-dimensional maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
///
/// The best point seen (endpoints included) is returned, so a maximum sitting
/// on the boundary is reported exactly.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Maximum {
    let mut best = Maximum {
        arg: lo,
        value: f(lo),
        evaluations: 1,
    };
    let consider = |x: f64, v: f64, best: &mut Maximum| {
        best.evaluations += 1;
        if v > best.value {
            best.arg = x;
            best.value = v;
        }
    };
    let fhi = f(hi);
    consider(hi, fhi, &mut best);
    if hi - lo <= tol {
        return best;
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    consider(x1, f1, &mut best);
    let mut f2 = f(x2);
    consider(x2, f2, &mut best);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            consider(x2, f2, &mut best);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            consider(x1, f1, &mut best);
        }
    }
    best
}

/// Maximize on `[lo, hi]` by a uniform scan over `points` nodes followed by a
/// golden-section refinement inside the two cells around every local maximum
/// of the samples.
///
/// Tolerates functions that are only piecewise unimodal, such as Legendre
/// transforms of non-concave curves.
pub fn scan_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Maximum {
    let points = points.max(3);
    let h = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points)
        .map(|i| if i + 1 == points { hi } else { lo + h * i as f64 })
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = Maximum {
        arg: lo,
        value: f64::NEG_INFINITY,
        evaluations: points,
    };
    for (i, (&x, &v)) in xs.iter().zip(&vs).enumerate() {
        if v > best.value {
            best.arg = x;
            best.value = v;
        }
        let left = if i == 0 { f64::NEG_INFINITY } else { vs[i - 1] };
        let right = if i + 1 == points { f64::NEG_INFINITY } else { vs[i + 1] };
        if v >= left && v >= right && (v > left || v > right) {
            let a = xs[i.saturating_sub(1)];
            let b = xs[(i + 1).min(points - 1)];
            let m = golden_max(&mut f, a, b, tol);
            best.evaluations += m.evaluations;
            if m.value > best.value {
                best.arg = m.arg;
                best.value = m.value;
            }
        }
    }
    best
}

/// Kahan–Babuška (Neumaier) compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_interior_and_boundary_maxima() {
        let m = golden_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!((m.arg - 0.3).abs() < 1e-8);
        let m = golden_max(|x| x, 0.0, 1.0, 1e-12);
        assert_eq!(m.arg, 1.0);
        let m = golden_max(|x| -x, 0.0, 1.0, 1e-12);
        assert_eq!(m.arg, 0.0);
    }

    #[test]
    fn scan_handles_two_bumps() {
        let f = |x: f64| (-(x - 0.2) * (x - 0.2) * 400.0).exp() + 1.5 * (-(x - 0.8) * (x - 0.8) * 400.0).exp();
        let m = scan_max(f, 0.0, 1.0, 101, 1e-12);
        assert!((m.arg - 0.8).abs() < 1e-6);
        assert!((m.value - 1.5).abs() < 1e-9);
    }

    #[test]
    fn scan_refines_peak_between_nodes() {
        // the interior peak (0.25 at x = 0.5) falls between nodes whose values
        // are below the endpoint value 0.249
        let f = |x: f64| {
            if x < 0.9 {
                0.25 - 40.0 * (x - 0.5) * (x - 0.5)
            } else {
                0.249
            }
        };
        let m = scan_max(f, 0.0, 1.0, 6, 1e-12);
        assert!((m.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bisection_converges() {
        let x = bisect(|x| x * x < 2.0, 0.0, 2.0, 1e-14);
        assert!((x - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn log_sum_exp_is_stable() {
        let v = log_sum_exp([1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp([]), f64::NEG_INFINITY);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-15).abs() < 1e-28);
    }
}

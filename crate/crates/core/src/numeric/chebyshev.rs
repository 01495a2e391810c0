use std::f64::consts::PI;

/// Chebyshev interpolant of a smooth function on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolate `f` at `m` Chebyshev points of the first kind.
    pub fn fit<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, m: usize) -> Self {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let values: Vec<f64> = (0..m)
            .map(|j| {
                let x = (PI * (j as f64 + 0.5) / m as f64).cos();
                f(mid + half * x)
            })
            .collect();
        let coeffs = (0..m)
            .map(|k| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / m as f64).cos())
                    .sum();
                2.0 * s / m as f64
            })
            .collect();
        Chebyshev { lo, hi, coeffs }
    }

    /// Fit with doubling degree until the trailing quarter of the coefficients
    /// is below `tol` relative to the function scale. Returns `None` when
    /// `max_points` is reached without convergence.
    pub fn fit_adaptive<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64, max_points: usize) -> Option<Self> {
        let mut m = 16;
        while m <= max_points {
            let fit = Chebyshev::fit(&mut f, lo, hi, m);
            let scale = fit.coeffs.iter().fold(1.0f64, |a, c| a.max(c.abs()));
            let tail: f64 = fit.coeffs[3 * m / 4..].iter().map(|c| c.abs()).sum();
            if tail <= tol * scale {
                return Some(fit);
            }
            m *= 2;
        }
        None
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + 0.5 * self.coeffs[0]
    }
}

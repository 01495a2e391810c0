use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss–Hermite rule for `∫ exp(-x²) f(x) dx`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Build an `n`-point rule with the Golub–Welsch eigenvalue method.
    ///
    /// The Jacobi matrix of the Hermite polynomials has zero diagonal and
    /// off-diagonal `sqrt(i/2)`. Eigenvalues are the nodes; the weights are
    /// `sqrt(pi)` times the squared first component of each eigenvector, which
    /// is all the implicit QL sweep has to track.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut d = vec![0.0; n];
        let mut e: Vec<f64> = (1..=n)
            .map(|i| if i < n { (i as f64 / 2.0).sqrt() } else { 0.0 })
            .collect();
        let mut z = vec![0.0; n];
        z[0] = 1.0;
        implicit_ql(&mut d, &mut e, &mut z);
        let mut pairs: Vec<(f64, f64)> = d
            .into_iter()
            .zip(z)
            .map(|(x, v)| (x, std::f64::consts::PI.sqrt() * v * v))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // symmetrize to kill round-off asymmetry
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (pairs[j].0 - pairs[i].0);
            let w = 0.5 * (pairs[i].1 + pairs[j].1);
            pairs[i] = (-x, w);
            pairs[j] = (x, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
        let (nodes, weights) = pairs.into_iter().unzip();
        GaussHermite { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Expectation of `f(Y)` for `Y ~ N(mean, sd²)`.
    pub fn gaussian_expectation<F: FnMut(f64) -> f64>(&self, mean: f64, sd: f64, mut f: F) -> f64 {
        let scale = std::f64::consts::SQRT_2 * sd;
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mean + scale * x))
            .sum();
        s / std::f64::consts::PI.sqrt()
    }
}

/// Shared, lazily built rule with `n` nodes.
pub fn gauss_hermite(n: usize) -> Arc<GaussHermite> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(GaussHermite::new(n));
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .entry(n)
        .or_insert(rule)
        .clone()
}

/// Implicit QL iteration for a symmetric tridiagonal matrix with diagonal `d`
/// and sub-diagonal `e` (`e[i]` couples `i` and `i + 1`, `e[n-1]` unused).
/// Only the first row `z` of the eigenvector matrix is accumulated.
fn implicit_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 60, "implicit QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m as isize - 1;
            let mut underflow = false;
            while i >= l as isize {
                let iu = i as usize;
                let f = s * e[iu];
                let b = c * e[iu];
                r = f.hypot(g);
                e[iu + 1] = r;
                if r == 0.0 {
                    d[iu + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[iu + 1] - p;
                r = (d[iu] - g) * s + 2.0 * c * b;
                p = s * r;
                d[iu + 1] = g + p;
                g = c * r - b;
                let zf = z[iu + 1];
                z[iu + 1] = s * z[iu] + c * zf;
                z[iu] = c * z[iu] - s * zf;
                i -= 1;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

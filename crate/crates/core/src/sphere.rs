//! Shannon's sphere-packing machinery for the Gaussian channel and the
//! two-class converse for binary memoryless sources.
//!
//! Rates are in bits per channel use here. Codewords sit on a sphere of
//! squared radius `n·Es`; the noise has variance `N0/2` per dimension.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::beta::beta_reg;

use crate::error::{domain, Error, Result};
use crate::numeric::{bisect, golden_max, integrate_adaptive, CompensatedSum};
use crate::par::{self, Execution};

/// Default relative tolerance of the cone-probability quadrature.
pub const CONE_TOL: f64 = 1e-10;
/// `2^{−nR}` must stay representable.
pub const MAX_CONE_BITS: f64 = 1000.0;
const RADIAL_SPAN: f64 = 14.0;
/// The angle density is integrated where it is within `e^{−60}` of its peak.
const LOG_SPAN: f64 = 60.0;
/// `exp` of anything below this is zero in double precision.
const UNDERFLOW: f64 = -746.0;

/// Fraction of the sphere's surface inside a cone of half-angle `theta`,
/// `∫_0^θ sin^{n−2} / ∫_0^π sin^{n−2}`.
pub fn cone_fraction(n: usize, theta: f64) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    if theta >= PI {
        return 1.0;
    }
    let a = 0.5 * (n as f64 - 1.0);
    let half = |t: f64| 0.5 * beta_reg(a, 0.5, t.sin().powi(2));
    if theta <= 0.5 * PI {
        half(theta)
    } else {
        1.0 - half(PI - theta)
    }
}

/// Half-angle `θ_{n,R}` of the cone holding a `2^{−nR}` share of the sphere.
pub fn cone_half_angle(n: usize, rate_bits: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain("n", n as f64, "n >= 2"));
    }
    if !(rate_bits >= 0.0) || n as f64 * rate_bits > MAX_CONE_BITS {
        return Err(domain("rate_bits", rate_bits, "0 <= n*R <= 1000"));
    }
    if rate_bits == 0.0 {
        return Ok(PI);
    }
    let target = (-(n as f64) * rate_bits * LN_2).exp();
    if target == 0.5 {
        return Ok(0.5 * PI);
    }
    Ok(bisect(|t| cone_fraction(n, t) < target, 0.0, PI, 0.0))
}

/// Cone of a rate-`R` code in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeGeometry {
    pub n: usize,
    pub theta: f64,
    pub rate_bits: f64,
}

impl ConeGeometry {
    pub fn from_rate(n: usize, rate_bits: f64) -> Result<Self> {
        Ok(ConeGeometry {
            n,
            theta: cone_half_angle(n, rate_bits)?,
            rate_bits,
        })
    }

    pub fn solid_angle_fraction(&self) -> f64 {
        cone_fraction(self.n, self.theta)
    }

    pub fn error_prob(&self, es_n0: f64) -> Result<f64> {
        cone_error_prob(self.n, self.theta, es_n0)
    }
}

/// `log ∫_0^∞ r^m exp(−(r − a)²/2) dr`.
fn log_radial(m: f64, a: f64, rel_tol: f64) -> Result<f64> {
    let peak = 0.5 * (a + (a * a + 4.0 * m).sqrt());
    // the log-integrand has curvature at most −1, so ±14 covers e^{−98}
    let log_at = |r: f64| m * r.ln() - 0.5 * (r - a) * (r - a);
    let top = log_at(peak);
    let lo = (peak - RADIAL_SPAN).max(0.0);
    let int = integrate_adaptive(|r| (log_at(r) - top).exp(), lo, peak + RADIAL_SPAN, rel_tol, 0.0, 2000)?;
    Ok(top + int.value.ln())
}

/// Log of the (unnormalized) density of the angle between a codeword at
/// distance `amp` from the origin and the received point, noise of unit
/// variance per dimension.
fn log_angle_density(n: usize, amp: f64, phi: f64, rel_tol: f64) -> Result<f64> {
    let s = phi.sin();
    if s <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let radial = log_radial(n as f64 - 1.0, amp * phi.cos(), rel_tol)?;
    Ok((n as f64 - 2.0) * s.ln() - 0.5 * amp * amp * s * s + radial)
}

/// `Q(θ)`: probability that Gaussian noise moves the received point outside
/// the cone of half-angle `theta` around the transmitted codeword.
pub fn cone_error_prob(n: usize, theta: f64, es_n0: f64) -> Result<f64> {
    cone_error_prob_with_tol(n, theta, es_n0, CONE_TOL)
}

pub fn cone_error_prob_with_tol(n: usize, theta: f64, es_n0: f64, rel_tol: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain("n", n as f64, "n >= 2"));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(domain("theta", theta, "0 <= theta <= pi"));
    }
    if !(es_n0 > 0.0 && es_n0.is_finite()) {
        return Err(domain("es_n0", es_n0, "0 < Es/N0 < inf"));
    }
    if theta >= PI {
        return Ok(0.0);
    }
    if theta <= 0.0 {
        return Ok(1.0);
    }
    let amp = (2.0 * n as f64 * es_n0).sqrt();
    let radial_tol = rel_tol * 1e-2;
    let mut failure = None;
    let mut log_p = |phi: f64| match log_angle_density(n, amp, phi, radial_tol) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    // the angle density is unimodal; its bulk can be a spike of width ~1/amp
    let mode = golden_max(&mut log_p, 0.0, PI, 1e-14);
    let peak = mode.value;
    let below = |log_p: &mut dyn FnMut(f64) -> f64, from: f64, to: f64, level: f64| {
        // first point between `from` and `to` (moving away from the mode)
        // where the density falls below `level`
        if log_p(to) >= level {
            return to;
        }
        let (lo, hi) = (from.min(to), from.max(to));
        if to > from {
            bisect(|x| log_p(x) >= level, lo, hi, 0.0)
        } else {
            bisect(|x| log_p(x) < level, lo, hi, 0.0)
        }
    };
    let left = below(&mut log_p, mode.arg, 0.0, peak - LOG_SPAN);
    let right = below(&mut log_p, mode.arg, PI, peak - LOG_SPAN);
    let integrate = |log_p: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64, shift: f64| {
        integrate_adaptive(|phi| (log_p(phi) - shift).exp(), lo, hi, rel_tol, 0.0, 4000).map(|i| i.value)
    };
    let total = integrate(&mut log_p, left, mode.arg, peak)? + integrate(&mut log_p, mode.arg, right, peak)?;
    let q = if theta <= mode.arg {
        let head = if theta <= left {
            0.0
        } else {
            integrate(&mut log_p, left, theta, peak)?
        };
        1.0 - head / total
    } else {
        let start = log_p(theta);
        if start - peak < UNDERFLOW {
            return Ok(0.0);
        }
        let end = below(&mut log_p, theta, PI, start - LOG_SPAN);
        (start - peak).exp() * integrate(&mut log_p, theta, end, start)? / total
    };
    if let Some(e) = failure {
        return Err(e);
    }
    if !(total > 0.0) {
        return Err(Error::Quadrature("angle density vanished".into()));
    }
    Ok(q.clamp(0.0, 1.0))
}

/// Exact binomial coefficients `C(k, w)`, `w = 0..=k`.
#[derive(Debug, Clone)]
pub struct BinomialRow {
    coeffs: Vec<BigUint>,
    /// `prefix[w] = Σ_{w' < w} C(k, w')`.
    prefix: Vec<BigUint>,
}

/// Natural log of a big integer (`−inf` for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * LN_2
}

/// `⌈log2 x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: &BigUint) -> u64 {
    let bits = x.bits();
    if bits == 0 {
        return 0;
    }
    let power_of_two = x.trailing_zeros() == Some(bits - 1);
    if power_of_two {
        bits - 1
    } else {
        bits
    }
}

impl BinomialRow {
    pub fn new(k: usize) -> Self {
        let mut coeffs = Vec::with_capacity(k + 1);
        let mut c = BigUint::one();
        for w in 0..=k {
            coeffs.push(c.clone());
            c = c * BigUint::from(k - w) / BigUint::from(w + 1);
        }
        let mut prefix = Vec::with_capacity(k + 2);
        let mut acc = BigUint::zero();
        prefix.push(acc.clone());
        for c in &coeffs {
            acc += c;
            prefix.push(acc.clone());
        }
        BinomialRow { coeffs, prefix }
    }

    pub fn k(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, w: usize) -> &BigUint {
        &self.coeffs[w]
    }

    /// `Σ_{w=w1}^{w2} C(k, w)`, zero for an empty range.
    pub fn range_count(&self, w1: usize, w2: usize) -> BigUint {
        if w1 > w2 || w1 > self.k() {
            return BigUint::zero();
        }
        let w2 = w2.min(self.k());
        &self.prefix[w2 + 1] - &self.prefix[w1]
    }

    /// `B_{k,p}(w1, w2) = Σ_{w=w1}^{w2} C(k,w) p^w (1−p)^{k−w}`.
    pub fn tail(&self, p: f64, w1: usize, w2: usize) -> f64 {
        if w1 > w2 || w1 > self.k() {
            return 0.0;
        }
        let w2 = w2.min(self.k());
        let k = self.k() as f64;
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        let term = |w: usize| {
            let wf = w as f64;
            let mut v = ln_big(&self.coeffs[w]);
            if w > 0 {
                v += wf * lp;
            }
            if (w as f64) < k {
                v += (k - wf) * lq;
            }
            v
        };
        let logs: Vec<f64> = (w1..=w2).map(term).collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return 0.0;
        }
        let mut sum = CompensatedSum::default();
        for l in logs {
            sum.add((l - top).exp());
        }
        (top.exp() * sum.value()).min(1.0)
    }

    /// `R(w1, w2) = ⌈log2 Σ_{w=w1}^{w2} C(k,w)⌉ / n` in bits.
    pub fn class_rate_bits(&self, n: usize, w1: usize, w2: usize) -> f64 {
        ceil_log2(&self.range_count(w1, w2)) as f64 / n as f64
    }
}

pub fn binomial_tail(k: usize, p: f64, w1: usize, w2: usize) -> f64 {
    BinomialRow::new(k).tail(p, w1, w2)
}

pub fn class_rate_bits(n: usize, k: usize, w1: usize, w2: usize) -> f64 {
    BinomialRow::new(k).class_rate_bits(n, w1, w2)
}

/// Minimizer of the two-class converse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoClassBound {
    pub value: f64,
    /// Class 1 holds weights `0..=w1`, class 2 weights `w1+1..=w2`.
    pub w1: usize,
    pub w2: usize,
    pub r1_bits: f64,
    pub r2_bits: f64,
}

/// Settings of [`two_class_lower_bound_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub rel_tol: f64,
    pub execution: Execution,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            rel_tol: CONE_TOL,
            execution: Execution::default(),
        }
    }
}

/// Terms of the two-class converse for one source and channel quality.
#[derive(Debug, Clone)]
pub struct TwoClassProblem {
    k: usize,
    n: usize,
    row: BinomialRow,
    /// `B(0, w)` and `B(w, k)` as functions of `w`, plus the single terms.
    masses: Vec<f64>,
    /// `Q(θ_{n, m/n})` for every `m = ⌈log2 |class|⌉` in use.
    cone: BTreeMap<u64, f64>,
}

impl TwoClassProblem {
    pub fn new(k: usize, n: usize, p: f64, es_n0: f64, opts: BoundOptions) -> Result<Self> {
        if !(p > 0.0 && p <= 0.5) {
            return Err(domain("p", p, "0 < p <= 1/2"));
        }
        if k == 0 || n < 2 {
            return Err(Error::InvalidCodec(format!(
                "need k >= 1 and n >= 2, got k = {k}, n = {n}"
            )));
        }
        let row = BinomialRow::new(k);
        let masses = (0..=k).map(|w| row.tail(p, w, w)).collect();
        // pre-pass: every class size that can occur, then one Q per size
        let mut bits: Vec<u64> = Vec::new();
        for a in 0..=k {
            for b in a..=k {
                bits.push(ceil_log2(&row.range_count(a, b)));
            }
        }
        bits.sort_unstable();
        bits.dedup();
        let values = par::map(opts.execution, &bits, |&m| {
            let theta = cone_half_angle(n, m as f64 / n as f64)?;
            cone_error_prob_with_tol(n, theta, es_n0, opts.rel_tol)
        });
        let mut cone = BTreeMap::new();
        for (m, v) in bits.into_iter().zip(values) {
            cone.insert(m, v?);
        }
        Ok(TwoClassProblem {
            k,
            n,
            row,
            masses,
            cone,
        })
    }

    fn mass(&self, w1: usize, w2: usize) -> f64 {
        if w1 > w2 {
            return 0.0;
        }
        let mut s = CompensatedSum::default();
        for m in &self.masses[w1..=w2] {
            s.add(*m);
        }
        s.value()
    }

    fn class_term(&self, w1: usize, w2: usize) -> f64 {
        if w1 > w2 {
            return 0.0;
        }
        let m = ceil_log2(&self.row.range_count(w1, w2));
        self.mass(w1, w2) * self.cone[&m]
    }

    /// Objective of the converse at a split `w1 < w2`.
    pub fn objective(&self, w1: usize, w2: usize) -> f64 {
        self.class_term(0, w1) + self.class_term(w1 + 1, w2) + self.mass(w2 + 1, self.k)
    }

    pub fn rate_bits(&self, w1: usize, w2: usize) -> f64 {
        self.row.class_rate_bits(self.n, w1, w2)
    }

    /// Exact minimum over all `0 ≤ w1 < w2 ≤ k`.
    pub fn minimize(&self, exec: Execution) -> TwoClassBound {
        let k = self.k;
        let per_w1 = par::map_range(exec, 0..k, |w1| {
            (w1 + 1..=k)
                .map(|w2| (self.objective(w1, w2), w1, w2))
                .fold((f64::INFINITY, 0, 0), |a, b| if b.0 < a.0 { b } else { a })
        });
        let (value, w1, w2) = per_w1
            .into_iter()
            .fold((f64::INFINITY, 0, 0), |a, b| if b.0 < a.0 { b } else { a });
        TwoClassBound {
            value,
            w1,
            w2,
            r1_bits: self.rate_bits(0, w1),
            r2_bits: self.rate_bits(w1 + 1, w2),
        }
    }
}

/// Lower bound on the error probability of any two-class scheme with linear
/// codes and ML decoding, minimized over the weight split.
pub fn two_class_lower_bound(k: usize, n: usize, p: f64, es_n0: f64) -> Result<TwoClassBound> {
    two_class_lower_bound_with(k, n, p, es_n0, BoundOptions::default())
}

pub fn two_class_lower_bound_with(k: usize, n: usize, p: f64, es_n0: f64, opts: BoundOptions) -> Result<TwoClassBound> {
    Ok(TwoClassProblem::new(k, n, p, es_n0, opts)?.minimize(opts.execution))
}

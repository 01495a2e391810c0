//! Achievable error exponents of joint source-channel coding.
//!
//! * separate coding: `max_R min{Er(R), t·e(R/t)}`
//! * joint coding: `max_{ρ∈[0,1]} {E0(ρ) − t·Es(ρ)}` and its concave-hull version
//! * multi-class coding with `N` transmitted classes, either with free class
//!   rates ([`thm1_exponent`]) or the relaxed two-rate form ([`thm2_exponent`]).
//!
//! Values are in nats per channel use. The optimizers are generic over a
//! [`GallagerCurve`] so any `ρ ↦ E0(ρ)` can be plugged in; [`ExponentSuite`]
//! wires them to a concrete channel.

use serde::Serialize;

use crate::channel::{e0, ChannelSpec, E0Curve, GallagerCurve, InputDistribution};
use crate::error::{domain, Error, Result};
use crate::numeric::{golden_max, scan_max, Maximum, GOLDEN_TOL};
use crate::partition::threshold_from_rate;
use crate::source::{DiscreteSource, SourceChannelRatio};

/// Argument tolerance of the rate bisections.
pub const RATE_TOL: f64 = 1e-12;
/// Left and right sides of the concave-hull identity must agree this well.
pub const HULL_AGREEMENT_TOL: f64 = 1e-5;
const RATE_GRID: usize = 201;

/// Optimizing parameters of an exponent.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Argmax {
    /// Free rates in nats per channel use: `R_1 ≥ … ≥ R_N` for the multi-class
    /// bound, `(R, R')` for the two-rate bound, `R` for separate coding.
    pub rates: Vec<f64>,
    /// Class rates `R + (i−1)(R'−R)/(N−1)`, `i = 1..N`, of the two-rate bound.
    pub schedule: Vec<f64>,
    /// Per-symbol thresholds matching `rates` (rates clamped to `[t·H, t·log|V|]`).
    pub thresholds: Vec<f64>,
    /// Maximizing ρ of each term (source terms may report `+∞`).
    pub rhos: Vec<f64>,
}

/// Exponent value with its argmax and per-term breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentResult {
    pub value: f64,
    /// Every term of the outer minimum, in the order of the bound.
    pub terms: Vec<f64>,
    /// Index into `terms` of the binding term.
    pub active_term: usize,
    pub argmax: Argmax,
    pub iterations: usize,
    /// Achieved argument tolerance of the outer optimization.
    pub tolerance: f64,
}

fn active(terms: &[f64]) -> (usize, f64) {
    terms
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc })
}

fn check_t(t: SourceChannelRatio) -> f64 {
    t.value()
}

/// `t·e(R/t)` and its maximizing ρ.
fn source_term(src: &DiscreteSource, t: f64, rate: f64) -> (f64, f64) {
    let per_symbol = rate / t;
    let value = t * src.reliability(per_symbol);
    let rho = if per_symbol <= src.entropy() {
        0.0
    } else if per_symbol >= src.log_alphabet() {
        f64::INFINITY
    } else {
        let sigma = src.sigma_for_entropy(per_symbol);
        if sigma > 0.0 {
            1.0 / sigma - 1.0
        } else {
            f64::INFINITY
        }
    };
    (value, rho)
}

/// Smallest rate `R` with `t·e(R/t) ≥ target`; just above `t·log|V|` when
/// only the infinite branch reaches the target.
fn rate_for_source_term(src: &DiscreteSource, t: f64, target: f64) -> f64 {
    let r = t * src.rate_for_reliability(target / t);
    if t * src.reliability(r / t) >= target {
        r
    } else {
        r.next_up()
    }
}

fn thresholds_for(src: &DiscreteSource, t: SourceChannelRatio, rates: &[f64]) -> Vec<f64> {
    let tv = t.value();
    let (lo, hi) = (tv * src.entropy(), tv * src.log_alphabet());
    rates
        .iter()
        .map(|&r| threshold_from_rate(src, t, r.clamp(lo, hi)).unwrap_or(f64::NAN))
        .collect()
}

fn check_rates(rates: &[f64]) -> Result<()> {
    if rates.is_empty() {
        return Err(Error::InvalidPartition("need at least one class rate".into()));
    }
    if let Some(r) = rates.iter().find(|r| !(**r >= 0.0)) {
        return Err(domain("rate", *r, "rate >= 0"));
    }
    if rates.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidPartition("class rates must be nonincreasing".into()));
    }
    Ok(())
}

/// Terms `T_0 = t·e(R_1/t)`, `T_i = Er_i(R_i) + t·e(R_{i+1}/t)`,
/// `T_N = Er_N(R_N)` of the multi-class bound.
fn thm1_terms<F: FnMut(usize, f64) -> Maximum>(
    src: &DiscreteSource,
    t: f64,
    rates: &[f64],
    mut er: F,
) -> (Vec<f64>, Vec<f64>) {
    let n = rates.len();
    let mut terms = Vec::with_capacity(n + 1);
    let mut rhos = Vec::with_capacity(2 * n + 1);
    let (e1, r1) = source_term(src, t, rates[0]);
    terms.push(e1);
    rhos.push(r1);
    for i in 1..=n {
        let m = er(i, rates[i - 1]);
        rhos.push(m.arg);
        let tail = if i < n {
            let (e, r) = source_term(src, t, rates[i]);
            rhos.push(r);
            e
        } else {
            0.0
        };
        terms.push(m.value + tail);
    }
    (terms, rhos)
}

/// Multi-class exponent at fixed rates `R_1 ≥ … ≥ R_N` and a common `E0` curve.
pub fn thm1_exponent<C: GallagerCurve + ?Sized>(
    src: &DiscreteSource,
    curve: &C,
    t: SourceChannelRatio,
    rates: &[f64],
) -> Result<ExponentResult> {
    check_rates(rates)?;
    let (terms, rhos) = thm1_terms(src, check_t(t), rates, |_, r| curve.random_coding(r));
    let (idx, value) = active(&terms);
    Ok(ExponentResult {
        value,
        terms,
        active_term: idx,
        argmax: Argmax {
            rates: rates.to_vec(),
            schedule: Vec::new(),
            thresholds: thresholds_for(src, t, rates),
            rhos,
        },
        iterations: 0,
        tolerance: 0.0,
    })
}

/// Multi-class exponent at fixed rates with a separate input distribution per
/// class, evaluated with the exact channel function.
pub fn thm1_exponent_with_inputs(
    src: &DiscreteSource,
    ch: &ChannelSpec,
    t: SourceChannelRatio,
    rates: &[f64],
    inputs: &[InputDistribution],
) -> Result<ExponentResult> {
    check_rates(rates)?;
    if inputs.len() != rates.len() {
        return Err(Error::InvalidPartition(format!(
            "{} input distributions for {} classes",
            inputs.len(),
            rates.len()
        )));
    }
    for q in inputs {
        e0(ch, q, 0.5)?;
    }
    let (terms, rhos) = thm1_terms(src, check_t(t), rates, |i, r| {
        golden_max(
            |rho| e0(ch, &inputs[i - 1], rho).unwrap_or(f64::NEG_INFINITY) - rho * r,
            0.0,
            1.0,
            GOLDEN_TOL,
        )
    });
    let (idx, value) = active(&terms);
    Ok(ExponentResult {
        value,
        terms,
        active_term: idx,
        argmax: Argmax {
            rates: rates.to_vec(),
            schedule: Vec::new(),
            thresholds: thresholds_for(src, t, rates),
            rhos,
        },
        iterations: 0,
        tolerance: 0.0,
    })
}

/// Rates `R_1 ≥ … ≥ R_N` making every multi-class term at least `target`, if any.
///
/// Each rate is the smallest one its constraint allows: smaller rates only
/// raise the channel terms, so the greedy chain is feasible exactly when the
/// target is achievable.
fn thm1_level_set<C: GallagerCurve + ?Sized>(
    src: &DiscreteSource,
    curve: &C,
    t: f64,
    n: usize,
    target: f64,
) -> Option<Vec<f64>> {
    let mut rates = Vec::with_capacity(n);
    rates.push(rate_for_source_term(src, t, target));
    for i in 1..n {
        let er = curve.random_coding(rates[i - 1]).value;
        let next = if er >= target {
            0.0
        } else {
            rate_for_source_term(src, t, target - er)
        };
        if next > rates[i - 1] {
            return None;
        }
        rates.push(next);
    }
    (curve.random_coding(rates[n - 1]).value >= target).then_some(rates)
}

/// Multi-class exponent maximized over the class rates.
pub fn optimize_thm1<C: GallagerCurve + ?Sized>(
    src: &DiscreteSource,
    curve: &C,
    t: SourceChannelRatio,
    n: usize,
) -> Result<ExponentResult> {
    if n == 0 {
        return Err(domain("N", 0.0, "N >= 1"));
    }
    let tv = check_t(t);
    // the bound never exceeds Er(0) = E0(1)
    let mut hi = curve.random_coding(0.0).value;
    let mut lo = 0.0;
    let mut best = thm1_level_set(src, curve, tv, n, 0.0).unwrap_or_else(|| vec![0.0; n]);
    let mut iterations = 0;
    if thm1_level_set(src, curve, tv, n, hi).is_some() {
        lo = hi;
        best = thm1_level_set(src, curve, tv, n, hi).unwrap();
    }
    while hi - lo > RATE_TOL * hi.max(1.0) && iterations < crate::numeric::BISECTION_MAX_ITER {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        match thm1_level_set(src, curve, tv, n, mid) {
            Some(rates) => {
                lo = mid;
                best = rates;
            }
            None => hi = mid,
        }
    }
    let mut result = thm1_exponent(src, curve, t, &best)?;
    result.iterations = iterations;
    result.tolerance = hi - lo;
    Ok(result)
}

/// Terms of the two-rate bound.
struct Thm2Terms<'a, C: ?Sized> {
    src: &'a DiscreteSource,
    curve: &'a C,
    t: f64,
    n: usize,
}

impl<C: GallagerCurve + ?Sized> Thm2Terms<'_, C> {
    /// `max_{ρ≥0} {ρR' − t·Es(ρ)} = t·e(R'/t)`
    fn first(&self, rp: f64) -> (f64, f64) {
        source_term(self.src, self.t, rp)
    }

    /// `max_{ρ∈[0,1]} {E0(ρ) − t·Es(ρ) − ρ(R'−R)/(N−1)}`
    fn second(&self, gap: f64) -> Maximum {
        let slope = gap / (self.n - 1) as f64;
        let m = scan_max(
            |rho| self.curve.e0(rho) - self.t * self.src.es(rho) - rho * slope,
            0.0,
            1.0,
            33,
            GOLDEN_TOL,
        );
        if m.value < 0.0 {
            Maximum {
                arg: 0.0,
                value: 0.0,
                ..m
            }
        } else {
            m
        }
    }

    /// `Er(R)`
    fn third(&self, r: f64) -> Maximum {
        self.curve.random_coding(r)
    }

    fn evaluate(&self, r: f64, rp: f64) -> ([f64; 3], [f64; 3]) {
        let (a, ra) = self.first(rp);
        let b = self.second(rp - r);
        let c = self.third(r);
        ([a, b.value, c.value], [ra, b.arg, c.arg])
    }

    /// `ψ(R) = max_{R' ≥ R} min{T1(R'), T2(R'−R)}` and its maximizer.
    ///
    /// `T1` is nondecreasing and `T2` nonincreasing in `R'`, so the maximizer
    /// is their crossing.
    fn inner(&self, r: f64) -> (f64, f64) {
        let value_at = |rp: f64| self.first(rp).0.min(self.second(rp - r).value);
        if self.first(r).0 >= self.second(0.0).value {
            return (value_at(r), r);
        }
        let mut lo = r;
        let mut hi = (self.t * self.src.log_alphabet()).max(r).next_up();
        if self.first(hi).0 < self.second(hi - r).value {
            return (value_at(hi), hi);
        }
        while hi - lo > RATE_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.first(mid).0 < self.second(mid - r).value {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (vl, vh) = (value_at(lo), value_at(hi));
        if vl >= vh {
            (vl, lo)
        } else {
            (vh, hi)
        }
    }
}

fn check_classes(n: usize) -> Result<()> {
    if n < 2 {
        return Err(domain("N", n as f64, "N >= 2"));
    }
    Ok(())
}

fn schedule(n: usize, r: f64, rp: f64) -> Vec<f64> {
    (1..=n)
        .map(|i| r + (i - 1) as f64 * (rp - r) / (n - 1) as f64)
        .collect()
}

/// Two-rate multi-class bound at fixed `(R, R')`, `0 ≤ R ≤ R'`.
pub fn thm2_exponent<C: GallagerCurve + ?Sized>(
    src: &DiscreteSource,
    curve: &C,
    t: SourceChannelRatio,
    n: usize,
    r: f64,
    rp: f64,
) -> Result<ExponentResult> {
    check_classes(n)?;
    if !(r >= 0.0) {
        return Err(domain("R", r, "R >= 0"));
    }
    if !(rp >= r) {
        return Err(domain("R'", rp, "R' >= R"));
    }
    let terms = Thm2Terms {
        src,
        curve,
        t: check_t(t),
        n,
    };
    let (values, rhos) = terms.evaluate(r, rp);
    let (idx, value) = active(&values);
    let sched = schedule(n, r, rp);
    Ok(ExponentResult {
        value,
        terms: values.to_vec(),
        active_term: idx,
        argmax: Argmax {
            rates: vec![r, rp],
            thresholds: thresholds_for(src, t, &sched),
            schedule: sched,
            rhos: rhos.to_vec(),
        },
        iterations: 0,
        tolerance: 0.0,
    })
}

/// Two-rate multi-class bound maximized over `R' ≥ R ≥ 0`.
///
/// `ψ(R)` from [`Thm2Terms::inner`] is nondecreasing in `R` while `Er(R)` is
/// nonincreasing, so the outer maximizer is again a crossing found by
/// bisection.
pub fn optimize_thm2<C: GallagerCurve + ?Sized>(
    src: &DiscreteSource,
    curve: &C,
    t: SourceChannelRatio,
    n: usize,
) -> Result<ExponentResult> {
    check_classes(n)?;
    let terms = Thm2Terms {
        src,
        curve,
        t: check_t(t),
        n,
    };
    let mut hi = 1.0;
    while terms.third(hi).value > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    let mut iterations = 0;
    let value_at = |r: f64| {
        let (psi, rp) = terms.inner(r);
        (psi.min(terms.third(r).value), rp)
    };
    if terms.inner(0.0).0 < terms.third(0.0).value {
        while hi - lo > RATE_TOL && iterations < crate::numeric::BISECTION_MAX_ITER {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            if terms.inner(mid).0 < terms.third(mid).value {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    } else {
        hi = 0.0;
    }
    let (vl, rpl) = value_at(lo);
    let (vh, rph) = value_at(hi);
    let (r, rp) = if vl >= vh { (lo, rpl) } else { (hi, rph) };
    let mut result = thm2_exponent(src, curve, t, n, r, rp)?;
    result.iterations = iterations;
    result.tolerance = hi - lo;
    Ok(result)
}

/// Separate source-channel exponent `max_R min{Er(R), t·e(R/t)}`.
pub fn separate_exponent<C: GallagerCurve + ?Sized>(
    src: &DiscreteSource,
    curve: &C,
    t: SourceChannelRatio,
) -> Result<ExponentResult> {
    let tv = check_t(t);
    let top = tv * src.log_alphabet();
    let channel_wins = |r: f64| curve.random_coding(r).value > source_term(src, tv, r).0;
    let mut iterations = 0;
    let (rate, tolerance) = if channel_wins(top) {
        // the source term jumps to +∞ just above t·log|V|
        (top.next_up(), 0.0)
    } else {
        let (mut lo, mut hi) = (0.0, top);
        while hi - lo > RATE_TOL {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            if channel_wins(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = |r: f64| curve.random_coding(r).value.min(source_term(src, tv, r).0);
        (if v(lo) >= v(hi) { lo } else { hi }, hi - lo)
    };
    let er = curve.random_coding(rate);
    let (e, rho_s) = source_term(src, tv, rate);
    let terms = vec![er.value, e];
    let (idx, value) = active(&terms);
    Ok(ExponentResult {
        value,
        terms,
        active_term: idx,
        argmax: Argmax {
            rates: vec![rate],
            schedule: Vec::new(),
            thresholds: thresholds_for(src, t, &[rate]),
            rhos: vec![er.arg, rho_s],
        },
        iterations,
        tolerance,
    })
}

/// Joint exponent `max_{ρ∈[0,1]} {E0(ρ) − t·Es(ρ)}`.
pub fn joint_exponent<C: GallagerCurve + ?Sized>(
    src: &DiscreteSource,
    curve: &C,
    t: SourceChannelRatio,
) -> Result<ExponentResult> {
    let tv = check_t(t);
    let m = scan_max(|rho| curve.e0(rho) - tv * src.es(rho), 0.0, 1.0, 33, GOLDEN_TOL);
    let (value, arg) = if m.value > 0.0 { (m.value, m.arg) } else { (0.0, 0.0) };
    Ok(ExponentResult {
        value,
        terms: vec![value],
        active_term: 0,
        argmax: Argmax {
            rhos: vec![arg],
            ..Argmax::default()
        },
        iterations: m.evaluations,
        tolerance: GOLDEN_TOL,
    })
}

/// Concave-hull joint exponent.
///
/// Both sides of `min_R {Er(R) + t·e(R/t)} = max_ρ {Ē0(ρ) − t·Es(ρ)}` are
/// computed independently: the left one from `Er` of the raw curve, the right
/// one from the concave envelope of the curve. Disagreement beyond
/// [`HULL_AGREEMENT_TOL`] is an error; otherwise the right side is returned
/// with the left-side minimizer as the argmax rate.
pub fn joint_hull_exponent<C: GallagerCurve + ?Sized>(
    src: &DiscreteSource,
    curve: &C,
    t: SourceChannelRatio,
) -> Result<ExponentResult> {
    let tv = check_t(t);
    let top = tv * src.log_alphabet();
    // Er + t·e is convex in R and infinite beyond t·log|V|
    let left = scan_max(
        |r| -(curve.random_coding(r).value + source_term(src, tv, r).0),
        0.0,
        top,
        RATE_GRID,
        GOLDEN_TOL,
    );
    let left_value = -left.value;

    let hull = crate::channel::hull_of(curve);
    let right = golden_max(|rho| hull.eval(rho) - tv * src.es(rho), 0.0, 1.0, GOLDEN_TOL);
    let right_value = right.value.max(0.0);

    if (left_value - right_value).abs() > HULL_AGREEMENT_TOL {
        return Err(Error::HullMismatch {
            left: left_value,
            right: right_value,
        });
    }
    Ok(ExponentResult {
        value: right_value,
        terms: vec![left_value, right_value],
        active_term: 1,
        argmax: Argmax {
            rates: vec![left.arg],
            schedule: Vec::new(),
            thresholds: thresholds_for(src, t, &[left.arg]),
            rhos: vec![right.arg],
        },
        iterations: left.evaluations + right.evaluations,
        tolerance: GOLDEN_TOL,
    })
}

/// A source, a channel and a source-channel ratio with the channel functions
/// prepared once.
///
/// The multi-class bound with free rates uses the equiprobable input in every
/// class; the other exponents use `max_Q E0(ρ, Q)`. For symmetric channels
/// both curves coincide.
#[derive(Debug)]
pub struct ExponentSuite {
    source: DiscreteSource,
    t: SourceChannelRatio,
    uniform: E0Curve,
    optimized: Option<E0Curve>,
}

impl ExponentSuite {
    pub fn new(source: &DiscreteSource, channel: &ChannelSpec, t: SourceChannelRatio) -> Result<Self> {
        let uniform = E0Curve::uniform(channel)?;
        let optimized = if channel.is_symmetric() {
            None
        } else {
            Some(E0Curve::optimized(channel)?)
        };
        Ok(ExponentSuite {
            source: source.clone(),
            t,
            uniform,
            optimized,
        })
    }

    pub fn source(&self) -> &DiscreteSource {
        &self.source
    }

    pub fn t(&self) -> SourceChannelRatio {
        self.t
    }

    /// `ρ ↦ max_Q E0(ρ, Q)`.
    pub fn curve(&self) -> &E0Curve {
        self.optimized.as_ref().unwrap_or(&self.uniform)
    }

    /// `ρ ↦ E0(ρ, uniform)`.
    pub fn uniform_curve(&self) -> &E0Curve {
        &self.uniform
    }

    pub fn separate(&self) -> Result<ExponentResult> {
        separate_exponent(&self.source, self.curve(), self.t)
    }

    pub fn joint(&self) -> Result<ExponentResult> {
        joint_exponent(&self.source, self.curve(), self.t)
    }

    pub fn joint_hull(&self) -> Result<ExponentResult> {
        joint_hull_exponent(&self.source, self.curve(), self.t)
    }

    pub fn thm1_at(&self, rates: &[f64]) -> Result<ExponentResult> {
        thm1_exponent(&self.source, &self.uniform, self.t, rates)
    }

    pub fn thm1(&self, n: usize) -> Result<ExponentResult> {
        optimize_thm1(&self.source, &self.uniform, self.t, n)
    }

    pub fn thm2_at(&self, n: usize, r: f64, rp: f64) -> Result<ExponentResult> {
        thm2_exponent(&self.source, self.curve(), self.t, n, r, rp)
    }

    pub fn thm2(&self, n: usize) -> Result<ExponentResult> {
        optimize_thm2(&self.source, self.curve(), self.t, n)
    }
}

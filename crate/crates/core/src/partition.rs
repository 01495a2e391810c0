//! Probability-threshold partitions of the source message set.
//!
//! Messages `v` of length `k` fall into class `i` when
//! `γ_i^k < P(v) ≤ γ_{i+1}^k` with `γ_0 = 0` and `γ_{N+1} = 1`. Thresholds
//! are stored per symbol, `g_i = (1/k) log γ_i^k`. Class 0 collects the least
//! likely messages and is never transmitted.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::bisect;
use crate::source::{DiscreteSource, SourceChannelRatio};

/// Boundary tilt parameter `ρ*` of a class; `Infinite` is the uniform-tilt limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RhoStar {
    Finite(f64),
    Infinite,
}

impl RhoStar {
    /// `ρ*` as a float, `+∞` for the sentinel.
    pub fn value(self) -> f64 {
        match self {
            RhoStar::Finite(r) => r,
            RhoStar::Infinite => f64::INFINITY,
        }
    }

    /// Tilt `σ* = 1/(1+ρ*)`; zero for the sentinel.
    pub fn sigma(self) -> f64 {
        match self {
            RhoStar::Finite(r) => 1.0 / (1.0 + r),
            RhoStar::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, RhoStar::Infinite)
    }
}

impl fmt::Display for RhoStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoStar::Finite(r) => write!(f, "{r}"),
            RhoStar::Infinite => write!(f, "inf"),
        }
    }
}

/// Range of per-symbol thresholds that give `ρ* ≥ 0`:
/// `(Σ_v log p(v) / |V|, Σ_v p(v) log p(v))`.
pub fn admissible_band(src: &DiscreteSource) -> (f64, f64) {
    (src.uniform_mean_log_prob(), src.mean_log_prob())
}

/// Solve `Σ_v p_σ(v) log p(v) = g` for `ρ* = 1/σ − 1`.
///
/// Thresholds at or above the band return `ρ* = 0`, at or below it the
/// `Infinite` sentinel.
pub fn rho_star_from_threshold(src: &DiscreteSource, g: f64) -> RhoStar {
    let (lo, hi) = admissible_band(src);
    if g >= hi {
        return RhoStar::Finite(0.0);
    }
    if g <= lo {
        return RhoStar::Infinite;
    }
    // the tilted mean of log p increases with σ
    let sigma = bisect(|s| src.tilt(s).mean_log_prob < g, 0.0, 1.0, 1e-16);
    if sigma <= 0.0 {
        return RhoStar::Infinite;
    }
    RhoStar::Finite((1.0 / sigma - 1.0).max(0.0))
}

/// Class rate `R = t·Es'(ρ*)` in nats per channel use.
pub fn rate_from_rho_star(src: &DiscreteSource, t: SourceChannelRatio, rho_star: RhoStar) -> Result<f64> {
    match rho_star {
        RhoStar::Finite(r) if !(r >= 0.0) => Err(domain("rho_star", r, "rho_star >= 0")),
        RhoStar::Finite(r) => Ok(t.value() * src.es_deriv(r)),
        RhoStar::Infinite => Ok(t.value() * src.log_alphabet()),
    }
}

/// Per-symbol threshold whose class boundary has rate `R`.
pub fn threshold_from_rate(src: &DiscreteSource, t: SourceChannelRatio, rate: f64) -> Result<f64> {
    let per_symbol = rate / t.value();
    let (h, top) = (src.entropy(), src.log_alphabet());
    let slack = 1e-12 * top;
    if !(per_symbol >= h - slack && per_symbol <= top + slack) {
        return Err(domain("rate", rate, "t*H(V) <= rate <= t*log|V|"));
    }
    // H(p_σ) is flat near σ = 0, so absorb rounding from the division by t
    if per_symbol >= top * (1.0 - 4.0 * f64::EPSILON) {
        return Ok(src.uniform_mean_log_prob());
    }
    Ok(src.tilt(src.sigma_for_entropy(per_symbol)).mean_log_prob)
}

/// `Es(ρ*) + (ρ − ρ*) Es'(ρ*)`, written as `(1+ρ) H(p_σ*) + Σ p_σ* log p`
/// so that the `ρ* = ∞` limit needs no special case.
fn tangent(src: &DiscreteSource, rho_star: RhoStar, rho: f64) -> f64 {
    let tilt = src.tilt(rho_star.sigma());
    (1.0 + rho) * tilt.entropy() + tilt.mean_log_prob
}

/// Thresholds `g_1 < … < g_N` of an `N+1`-class partition together with the
/// equivalent boundary tilts and class rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    t: SourceChannelRatio,
    thresholds: Vec<f64>,
    rho_stars: Vec<RhoStar>,
    rates: Vec<f64>,
}

impl PartitionSpec {
    /// From strictly increasing per-symbol thresholds inside the admissible band.
    pub fn from_thresholds(src: &DiscreteSource, t: SourceChannelRatio, thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidPartition("need at least one threshold".into()));
        }
        if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPartition("thresholds must be strictly increasing".into()));
        }
        let (lo, hi) = admissible_band(src);
        let slack = 1e-12 * lo.abs().max(1.0);
        if let Some(g) = thresholds.iter().find(|g| !(**g >= lo - slack && **g <= hi + slack)) {
            return Err(Error::InvalidPartition(format!(
                "threshold {g} outside the band [{lo}, {hi}]"
            )));
        }
        let rho_stars: Vec<RhoStar> = thresholds.iter().map(|&g| rho_star_from_threshold(src, g)).collect();
        let rates = rho_stars
            .iter()
            .map(|&r| rate_from_rho_star(src, t, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(PartitionSpec {
            t,
            thresholds,
            rho_stars,
            rates,
        })
    }

    /// From strictly decreasing class rates `R_1 > … > R_N` in `[t·H, t·log|V|]`.
    pub fn from_rates(src: &DiscreteSource, t: SourceChannelRatio, rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidPartition("need at least one rate".into()));
        }
        if rates.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(Error::InvalidPartition("rates must be strictly decreasing".into()));
        }
        let thresholds = rates
            .iter()
            .map(|&r| threshold_from_rate(src, t, r))
            .collect::<Result<Vec<_>>>()?;
        let rho_stars: Vec<RhoStar> = thresholds.iter().map(|&g| rho_star_from_threshold(src, g)).collect();
        Ok(PartitionSpec {
            t,
            thresholds,
            rho_stars,
            rates,
        })
    }

    /// Number of transmitted classes `N`.
    pub fn classes(&self) -> usize {
        self.thresholds.len()
    }

    pub fn t(&self) -> SourceChannelRatio {
        self.t
    }

    /// `g_1, …, g_N`.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// `R_1, …, R_N` in nats per channel use.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// `g_i` for `i = 0..=N+1` with `g_0 = −∞` and `g_{N+1} = 0`.
    pub fn threshold(&self, i: usize) -> f64 {
        match i {
            0 => f64::NEG_INFINITY,
            i if i <= self.classes() => self.thresholds[i - 1],
            _ => 0.0,
        }
    }

    /// `ρ*_i` for `i = 0..=N+1` with `ρ*_0 = ∞` and `ρ*_{N+1} = 0`.
    pub fn rho_star(&self, i: usize) -> RhoStar {
        match i {
            0 => RhoStar::Infinite,
            i if i <= self.classes() => self.rho_stars[i - 1],
            _ => RhoStar::Finite(0.0),
        }
    }

    /// `R_i` for `i = 1..=N+1`, with `R_{N+1} = 0`.
    pub fn rate(&self, i: usize) -> f64 {
        assert!(i >= 1, "class rates start at index 1");
        if i <= self.classes() {
            self.rates[i - 1]
        } else {
            0.0
        }
    }

    /// Summary of class `i ∈ 0..=N` without a finite-length realization.
    pub fn class_info(&self, i: usize) -> ClassInfo {
        ClassInfo {
            index: i,
            rate: if i == 0 { f64::INFINITY } else { self.rate(i) },
            rho_star_lo: self.rho_star(i + 1),
            rho_star_hi: self.rho_star(i),
            weight_range: None,
        }
    }
}

/// One class of a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub index: usize,
    /// `R_i` in nats per channel use (`+∞` for class 0, which is not coded).
    pub rate: f64,
    /// `ρ*_{i+1}`
    pub rho_star_lo: RhoStar,
    /// `ρ*_i`
    pub rho_star_hi: RhoStar,
    /// Inclusive Hamming-weight range of a binary realization; `None` when empty
    /// or not realized.
    pub weight_range: Option<(usize, usize)>,
}

fn check_class(part: &PartitionSpec, i: usize) -> Result<()> {
    if i > part.classes() {
        return Err(Error::InvalidPartition(format!(
            "class {i} does not exist in a partition with {} coded classes",
            part.classes()
        )));
    }
    Ok(())
}

/// Whether class `i` is asymptotically empty: `g_i > max log p` or
/// `g_{i+1} ≤ min log p`.
pub fn class_is_empty(src: &DiscreteSource, part: &PartitionSpec, i: usize) -> bool {
    part.threshold(i) > src.max_log_prob() || part.threshold(i + 1) <= src.min_log_prob()
}

/// Class source function `Es_i(ρ)`: equal to `Es(ρ)` for
/// `ρ*_{i+1} ≤ ρ ≤ ρ*_i` and to the tangent of `Es` at the nearest boundary
/// elsewhere. `−∞` for an empty class.
pub fn class_source_fn(src: &DiscreteSource, part: &PartitionSpec, i: usize, rho: f64) -> Result<f64> {
    check_class(part, i)?;
    if !(rho >= 0.0) {
        return Err(domain("rho", rho, "rho >= 0"));
    }
    if class_is_empty(src, part, i) {
        return Ok(f64::NEG_INFINITY);
    }
    let (lo, hi) = (part.rho_star(i + 1), part.rho_star(i));
    if rho > hi.value() {
        Ok(tangent(src, hi, rho))
    } else if rho < lo.value() {
        Ok(tangent(src, lo, rho))
    } else {
        Ok(src.es(rho))
    }
}

/// Exponential decay rate of the class probability, `lim (1/k) log Pr{A_i}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassProbExponent {
    /// `−e(R_{i+1}/t)`, nats per source symbol.
    pub per_symbol: f64,
    /// `−t·e(R_{i+1}/t)`, nats per channel use.
    pub per_channel_use: f64,
}

pub fn class_prob_exponent(src: &DiscreteSource, part: &PartitionSpec, i: usize) -> Result<ClassProbExponent> {
    check_class(part, i)?;
    if class_is_empty(src, part, i) {
        return Err(Error::InvalidPartition(format!("class {i} is empty")));
    }
    let t = part.t().value();
    let e = src.reliability(part.rate(i + 1) / t);
    Ok(ClassProbExponent {
        per_symbol: -e,
        per_channel_use: -t * e,
    })
}

/// Hamming-weight realization of the partition for a binary memoryless
/// source at block length `k`.
///
/// `P(v) = p^w (1−p)^{k−w}` is nonincreasing in `w` for `p ≤ 1/2`, so every
/// class is a contiguous weight interval. Weights with `P(v)` exactly on a
/// threshold go to the lower class (strict lower, inclusive upper bound).
pub fn realize_partition_bms(src: &DiscreteSource, k: usize, part: &PartitionSpec) -> Result<Vec<ClassInfo>> {
    let p = src
        .bias()
        .ok_or_else(|| Error::InvalidDistribution("weight realization needs a binary source".into()))?;
    if p > 0.5 {
        return Err(domain("p", p, "p <= 1/2"));
    }
    if k == 0 {
        return Err(domain("k", 0.0, "k >= 1"));
    }
    let n = part.classes();
    let kf = k as f64;
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let slope = lp - lq;

    // first weight whose probability does not exceed γ^k (= k+1 when none)
    let first_at_or_below = |g: f64| -> usize {
        if g == f64::NEG_INFINITY {
            return k + 1;
        }
        if slope == 0.0 {
            return if kf * lq <= kf * g { 0 } else { k + 1 };
        }
        let w = kf * (g - lq) / slope;
        let nearest = w.round();
        let w = if (w - nearest).abs() <= 1e-9 * kf { nearest } else { w };
        w.ceil().clamp(0.0, kf + 1.0) as usize
    };

    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut info = part.class_info(i);
        // lower bound γ_i is strict, upper bound γ_{i+1} inclusive
        let w_lo = first_at_or_below(part.threshold(i + 1));
        let w_hi_excl = first_at_or_below(part.threshold(i));
        if w_lo < w_hi_excl && w_lo <= k {
            info.weight_range = Some((w_lo, (w_hi_excl - 1).min(k)));
        }
        out.push(info);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bms(p: f64) -> DiscreteSource {
        DiscreteSource::bernoulli(p).unwrap()
    }

    fn unit() -> SourceChannelRatio {
        SourceChannelRatio::new(1.0).unwrap()
    }

    fn tilted_mean(src: &DiscreteSource, r: RhoStar) -> f64 {
        let s = r.sigma();
        let w: Vec<f64> = src.probs().iter().map(|p| p.powf(s)).collect();
        let z: f64 = w.iter().sum();
        w.iter().zip(src.probs()).map(|(wi, p)| wi / z * p.ln()).sum()
    }

    #[test]
    fn rho_star_at_band_edges() {
        let s = bms(0.1);
        let (lo, hi) = admissible_band(&s);
        assert_eq!(rho_star_from_threshold(&s, hi), RhoStar::Finite(0.0));
        assert_eq!(rho_star_from_threshold(&s, lo), RhoStar::Infinite);
        assert_eq!(rho_star_from_threshold(&s, hi + 0.1), RhoStar::Finite(0.0));
        assert_eq!(rho_star_from_threshold(&s, lo - 0.1), RhoStar::Infinite);
    }

    #[test]
    fn rho_star_resubstitution() {
        let s = bms(0.1);
        let r = rho_star_from_threshold(&s, -0.4);
        assert!(matches!(r, RhoStar::Finite(x) if x > 0.0));
        assert!((tilted_mean(&s, r) + 0.4).abs() < 1e-9);
        let s4 = DiscreteSource::new(vec![0.5, 0.3, 0.15, 0.05]).unwrap();
        let (lo, hi) = admissible_band(&s4);
        for j in 1..20 {
            let g = lo + (hi - lo) * j as f64 / 20.0;
            assert!((tilted_mean(&s4, rho_star_from_threshold(&s4, g)) - g).abs() < 1e-9);
        }
    }

    #[test]
    fn rate_values() {
        let s = bms(0.1);
        let t = unit();
        assert_abs_diff_eq!(
            rate_from_rho_star(&s, t, RhoStar::Finite(0.0)).unwrap(),
            s.entropy(),
            epsilon = 1e-15
        );
        assert_eq!(
            rate_from_rho_star(&s, t, RhoStar::Infinite).unwrap(),
            std::f64::consts::LN_2
        );
        // σ = 1/2 tilt of (0.9, 0.1) is (0.75, 0.25)
        let h = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert_abs_diff_eq!(
            rate_from_rho_star(&s, t, RhoStar::Finite(1.0)).unwrap(),
            h,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(h, 0.562_335, epsilon = 1e-6);
        assert!(rate_from_rho_star(&s, t, RhoStar::Finite(-0.5)).is_err());
    }

    #[test]
    fn threshold_round_trip() {
        let s = bms(0.1);
        let t = SourceChannelRatio::new(0.8).unwrap();
        let (lo, hi) = admissible_band(&s);
        assert_abs_diff_eq!(
            threshold_from_rate(&s, t, 0.8 * s.entropy()).unwrap(),
            hi,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            threshold_from_rate(&s, t, 0.8 * std::f64::consts::LN_2).unwrap(),
            lo,
            epsilon = 1e-12
        );
        assert!(threshold_from_rate(&s, t, 0.0).is_err());
        assert!(threshold_from_rate(&s, t, 0.6).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let r = 0.8 * rng.gen_range(s.entropy()..std::f64::consts::LN_2);
            let g = threshold_from_rate(&s, t, r).unwrap();
            let back = rate_from_rho_star(&s, t, rho_star_from_threshold(&s, g)).unwrap();
            assert!((back - r).abs() < 1e-8, "{r} -> {g} -> {back}");
        }
    }

    #[test]
    fn partition_representations_agree() {
        let s = bms(0.1);
        let t = unit();
        let a = PartitionSpec::from_thresholds(&s, t, vec![-0.6, -0.4]).unwrap();
        let b = PartitionSpec::from_rates(&s, t, a.rates().to_vec()).unwrap();
        for (x, y) in a.thresholds().iter().zip(b.thresholds()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-9);
        }
        assert!(a.rates()[0] > a.rates()[1]);
        assert!(PartitionSpec::from_thresholds(&s, t, vec![-0.4, -0.6]).is_err());
        assert!(PartitionSpec::from_thresholds(&s, t, vec![-1.5]).is_err());
        assert!(PartitionSpec::from_rates(&s, t, vec![0.4, 0.5]).is_err());
        assert_eq!(a.rho_star(0), RhoStar::Infinite);
        assert_eq!(a.rho_star(3), RhoStar::Finite(0.0));
        assert_eq!(a.rate(3), 0.0);
    }

    #[test]
    fn single_class_keeps_source_function() {
        let s = bms(0.1);
        let (lo, _) = admissible_band(&s);
        let part = PartitionSpec::from_thresholds(&s, unit(), vec![lo]).unwrap();
        for j in 0..=40 {
            let rho = j as f64 * 0.25;
            assert_abs_diff_eq!(class_source_fn(&s, &part, 1, rho).unwrap(), s.es(rho), epsilon = 1e-12);
        }
    }

    #[test]
    fn class_function_branches() {
        let s = bms(0.1);
        let part = PartitionSpec::from_thresholds(&s, unit(), vec![-0.4]).unwrap();
        let rs = part.rho_star(1).value();
        // class 1 sits on [0, ρ*_1]
        assert_eq!(class_source_fn(&s, &part, 1, 0.5 * rs).unwrap(), s.es(0.5 * rs));
        let expected = s.es(rs) + s.es_deriv(rs);
        assert_abs_diff_eq!(
            class_source_fn(&s, &part, 1, rs + 1.0).unwrap(),
            expected,
            epsilon = 1e-12
        );
        // class 0 sits on [ρ*_1, ∞) with the tangent below
        assert_eq!(class_source_fn(&s, &part, 0, rs + 1.0).unwrap(), s.es(rs + 1.0));
        assert_abs_diff_eq!(
            class_source_fn(&s, &part, 0, 0.0).unwrap(),
            s.es(rs) - rs * s.es_deriv(rs),
            epsilon = 1e-12
        );
        assert!(class_source_fn(&s, &part, 2, 0.0).is_err());
    }

    #[test]
    fn class_function_is_convex_and_below_es() {
        let s = bms(0.1);
        let part = PartitionSpec::from_thresholds(&s, unit(), vec![-0.7, -0.5, -0.4]).unwrap();
        for i in 0..=3 {
            let lo = part.rho_star(i + 1).value();
            let hi = part.rho_star(i).value();
            let vals: Vec<(f64, f64)> = (0..=400)
                .map(|j| {
                    let rho = j as f64 * 0.02;
                    (rho, class_source_fn(&s, &part, i, rho).unwrap())
                })
                .collect();
            for (rho, v) in &vals {
                assert!(*v <= s.es(*rho) + 1e-9);
                if *rho < lo - 1e-6 || *rho > hi + 1e-6 {
                    assert!(*v < s.es(*rho));
                }
            }
            for w in vals.windows(3) {
                assert!(w[1].1 <= 0.5 * (w[0].1 + w[2].1) + 1e-9);
            }
        }
    }

    #[test]
    fn class_function_is_smooth_at_joins() {
        let s = bms(0.2);
        let part = PartitionSpec::from_thresholds(&s, unit(), vec![-0.8, -0.6]).unwrap();
        let rs = part.rho_star(1).value();
        for i in [0, 1] {
            let h = 1e-6;
            let left = class_source_fn(&s, &part, i, rs - h).unwrap();
            let mid = class_source_fn(&s, &part, i, rs).unwrap();
            let right = class_source_fn(&s, &part, i, rs + h).unwrap();
            assert!((left - mid).abs() < 1e-5 && (right - mid).abs() < 1e-5);
            let dl = (mid - left) / h;
            let dr = (right - mid) / h;
            assert!((dl - dr).abs() < 1e-4, "class {i}: {dl} vs {dr}");
        }
    }

    #[test]
    fn empty_class_is_minus_infinity() {
        let s = bms(0.1);
        // thresholds above max log p leave class 1 empty
        let part = PartitionSpec {
            t: unit(),
            thresholds: vec![-0.05],
            rho_stars: vec![RhoStar::Finite(0.0)],
            rates: vec![s.entropy()],
        };
        assert!(class_is_empty(&s, &part, 1));
        assert_eq!(class_source_fn(&s, &part, 1, 0.3).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn class_probability_exponent_values() {
        let s = bms(0.1);
        let t = unit();
        let part = PartitionSpec::from_rates(&s, t, vec![0.5, 0.4]).unwrap();
        assert_eq!(class_prob_exponent(&s, &part, 2).unwrap().per_symbol, 0.0);
        let e0 = class_prob_exponent(&s, &part, 0).unwrap();
        assert_abs_diff_eq!(e0.per_symbol, -s.reliability(0.5), epsilon = 1e-15);
        let at_entropy = PartitionSpec::from_rates(&s, t, vec![0.5, s.entropy()]).unwrap();
        assert_eq!(class_prob_exponent(&s, &at_entropy, 1).unwrap().per_symbol, 0.0);
    }

    #[test]
    fn weight_realization_band_edges() {
        let s = bms(0.1);
        let (lo, hi) = admissible_band(&s);
        // the lowest admissible threshold is the probability of weight k/2
        let part = PartitionSpec::from_thresholds(&s, unit(), vec![lo]).unwrap();
        let classes = realize_partition_bms(&s, 20, &part).unwrap();
        assert_eq!(classes[1].weight_range, Some((0, 9)));
        assert_eq!(classes[0].weight_range, Some((10, 20)));
        // the highest is the typical weight kp
        let part = PartitionSpec::from_thresholds(&s, unit(), vec![hi]).unwrap();
        let classes = realize_partition_bms(&s, 20, &part).unwrap();
        assert_eq!(classes[1].weight_range, Some((0, 1)));
        assert_eq!(classes[0].weight_range, Some((2, 20)));
    }

    #[test]
    fn weight_realization_with_every_weight_in_one_class() {
        let s = bms(0.1);
        // a threshold below log min p lies outside the band; then class 0 is empty
        let part = PartitionSpec {
            t: unit(),
            thresholds: vec![0.1f64.ln() - 0.01],
            rho_stars: vec![RhoStar::Infinite],
            rates: vec![std::f64::consts::LN_2],
        };
        assert!(class_is_empty(&s, &part, 0));
        let classes = realize_partition_bms(&s, 20, &part).unwrap();
        assert_eq!(classes[0].weight_range, None);
        assert_eq!(classes[1].weight_range, Some((0, 20)));
    }

    #[test]
    fn weight_realization_boundary_convention() {
        let s = bms(0.1);
        let k = 10;
        let g = (3.0 * 0.1f64.ln() + 7.0 * 0.9f64.ln()) / k as f64;
        let part = PartitionSpec::from_thresholds(&s, unit(), vec![g]).unwrap();
        let classes = realize_partition_bms(&s, k, &part).unwrap();
        // P(weight 3) = γ^k: excluded from class 1 (strict), included in class 0
        assert_eq!(classes[1].weight_range, Some((0, 2)));
        assert_eq!(classes[0].weight_range, Some((3, 10)));
    }

    #[test]
    fn weight_realization_matches_direct_classification() {
        let s = bms(0.15);
        let part = PartitionSpec::from_thresholds(&s, unit(), vec![-0.9, -0.7, -0.5]).unwrap();
        for k in [1, 5, 16, 33, 100] {
            let classes = realize_partition_bms(&s, k, &part).unwrap();
            for w in 0..=k {
                let lp = w as f64 * 0.15f64.ln() + (k - w) as f64 * 0.85f64.ln();
                let direct = (0..=3)
                    .find(|&i| k as f64 * part.threshold(i) < lp && lp <= k as f64 * part.threshold(i + 1))
                    .unwrap();
                let realized = classes
                    .iter()
                    .position(|c| matches!(c.weight_range, Some((a, b)) if a <= w && w <= b))
                    .unwrap();
                assert_eq!(direct, realized, "k={k} w={w}");
            }
        }
    }

    #[test]
    fn weight_realization_needs_binary_low_bias() {
        let s = DiscreteSource::new(vec![0.5, 0.3, 0.2]).unwrap();
        let (lo, _) = admissible_band(&s);
        let part = PartitionSpec::from_thresholds(&s, unit(), vec![lo]).unwrap();
        assert!(realize_partition_bms(&s, 4, &part).is_err());
    }

    proptest! {
        #[test]
        fn threshold_to_rate_is_decreasing(p in 0.02f64..0.45, a in 0.01f64..0.99, b in 0.01f64..0.99) {
            prop_assume!((a - b).abs() > 1e-3);
            let s = bms(p);
            let (lo, hi) = admissible_band(&s);
            let (ga, gb) = (lo + a * (hi - lo), lo + b * (hi - lo));
            let t = unit();
            let ra = rate_from_rho_star(&s, t, rho_star_from_threshold(&s, ga)).unwrap();
            let rb = rate_from_rho_star(&s, t, rho_star_from_threshold(&s, gb)).unwrap();
            prop_assert!((ga < gb) == (ra > rb));
        }

        #[test]
        fn weight_ranges_partition_all_weights(p in 0.02f64..0.5, k in 1usize..200, a in 0.05f64..0.45, b in 0.55f64..0.95) {
            let s = bms(p);
            let (lo, hi) = admissible_band(&s);
            let part = PartitionSpec::from_thresholds(&s, unit(), vec![lo + a * (hi - lo), lo + b * (hi - lo)]).unwrap();
            let classes = realize_partition_bms(&s, k, &part).unwrap();
            let mut next = 0;
            for c in classes.iter().rev() {
                if let Some((x, y)) = c.weight_range {
                    prop_assert_eq!(x, next);
                    next = y + 1;
                }
            }
            prop_assert_eq!(next, k + 1);
        }
    }
}

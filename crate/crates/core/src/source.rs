//! Discrete memoryless sources.
//!
//! All rates and exponents are in nats. The Gallager source function and its
//! relatives are evaluated through the tilted family `p_σ(v) ∝ p(v)^σ` with
//! `σ = 1/(1+ρ)`: with `κ(σ) = log Σ p^σ` and `m(σ) = Σ p_σ log p`,
//!
//! * `Es(ρ) = κ(σ)/σ`,
//! * `Es'(ρ) = H(p_σ) = κ(σ) − σ m(σ)`,
//! * the Legendre value at that slope is `D(p_σ ‖ p) = (σ − 1) m(σ) − κ(σ)`.
//!
//! Working in σ keeps the `ρ → ∞` end (σ → 0) well conditioned.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::{bisect, log_sum_exp};

/// Probability vectors must sum to one within this tolerance.
pub const SUM_TOL: f64 = 1e-12;

/// Memoryless source with strictly positive symbol probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSource {
    probs: Vec<f64>,
    log_probs: Vec<f64>,
}

/// Log-partition and tilted mean log-probability at a tilt σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tilt {
    pub sigma: f64,
    /// `κ(σ) = log Σ p^σ`
    pub log_partition: f64,
    /// `m(σ) = Σ p_σ log p`
    pub mean_log_prob: f64,
}

impl Tilt {
    pub fn entropy(&self) -> f64 {
        self.log_partition - self.sigma * self.mean_log_prob
    }

    pub fn divergence(&self) -> f64 {
        ((self.sigma - 1.0) * self.mean_log_prob - self.log_partition).max(0.0)
    }
}

impl DiscreteSource {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "a source needs at least 2 symbols, got {}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "symbol probabilities must be strictly positive, got {p}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let log_probs = probs.iter().map(|p| p.ln()).collect();
        Ok(DiscreteSource { probs, log_probs })
    }

    /// Binary memoryless source with `Pr{1} = p`. Symbol order is `[0, 1]`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", p, "0 < p < 1"));
        }
        DiscreteSource::new(vec![1.0 - p, p])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    /// `log |V|`, the largest entropy (and rate) of interest.
    pub fn log_alphabet(&self) -> f64 {
        (self.probs.len() as f64).ln()
    }

    /// `Pr{1}` for a binary source.
    pub fn bias(&self) -> Option<f64> {
        (self.probs.len() == 2).then(|| self.probs[1])
    }

    /// `max_v log p(v)`.
    pub fn max_log_prob(&self) -> f64 {
        self.log_probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `min_v log p(v)`.
    pub fn min_log_prob(&self) -> f64 {
        self.log_probs.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `Σ p log p = −H(V)`: upper edge of the admissible threshold band.
    pub fn mean_log_prob(&self) -> f64 {
        self.probs.iter().zip(&self.log_probs).map(|(p, l)| p * l).sum()
    }

    /// `Σ (1/|V|) log p`: lower edge of the admissible threshold band.
    pub fn uniform_mean_log_prob(&self) -> f64 {
        self.log_probs.iter().sum::<f64>() / self.probs.len() as f64
    }

    /// Entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.mean_log_prob()
    }

    pub(crate) fn tilt(&self, sigma: f64) -> Tilt {
        let log_partition = log_sum_exp(self.log_probs.iter().map(|l| sigma * l));
        let mean_log_prob = self
            .log_probs
            .iter()
            .map(|l| (sigma * l - log_partition).exp() * l)
            .sum();
        Tilt {
            sigma,
            log_partition,
            mean_log_prob,
        }
    }

    /// Gallager's source function `Es(ρ) = (1+ρ) log Σ p(v)^{1/(1+ρ)}`.
    pub fn gallager_fn(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0) {
            return Err(domain("rho", rho, "rho >= 0"));
        }
        Ok(self.es(rho))
    }

    /// Unchecked `Es(ρ)` for `ρ > −1`.
    pub(crate) fn es(&self, rho: f64) -> f64 {
        if rho == f64::INFINITY {
            return f64::INFINITY;
        }
        if rho == 0.0 {
            return 0.0;
        }
        (1.0 + rho) * log_sum_exp(self.log_probs.iter().map(|l| l / (1.0 + rho)))
    }

    /// `Es'(ρ)`, the entropy of the tilted distribution at `σ = 1/(1+ρ)`.
    pub fn gallager_fn_deriv(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0) {
            return Err(domain("rho", rho, "rho >= 0"));
        }
        Ok(self.es_deriv(rho))
    }

    /// Unchecked `Es'(ρ)`; `ρ = ∞` gives the limit `log |V|`.
    pub(crate) fn es_deriv(&self, rho: f64) -> f64 {
        if rho == f64::INFINITY {
            return self.log_alphabet();
        }
        self.tilt(1.0 / (1.0 + rho)).entropy()
    }

    /// Tilted distribution `p_σ(v) = p(v)^σ / Σ p^σ`.
    pub fn tilted(&self, sigma: f64) -> Result<DiscreteSource> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain("sigma", sigma, "sigma > 0"));
        }
        if sigma == 1.0 {
            return Ok(self.clone());
        }
        let lz = log_sum_exp(self.log_probs.iter().map(|l| sigma * l));
        let mut probs: Vec<f64> = self.log_probs.iter().map(|l| (sigma * l - lz).exp()).collect();
        if probs.iter().any(|p| *p <= 0.0) || !lz.is_finite() {
            return Err(Error::Underflow(sigma));
        }
        // renormalize the rounding residue away
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        DiscreteSource::new(probs)
    }

    /// Source reliability function `e(R) = sup_{ρ≥0} {ρR − Es(ρ)}`.
    ///
    /// Zero for `R ≤ H(V)`; `+∞` for `R > log |V|` where the supremum is
    /// unbounded. Inside, the supremum sits where `Es'(ρ) = R`, found by
    /// bisection on the tilt.
    pub fn reliability(&self, rate: f64) -> f64 {
        let h = self.entropy();
        let top = self.log_alphabet();
        if rate <= h {
            return 0.0;
        }
        if rate > top {
            return f64::INFINITY;
        }
        if rate == top {
            return self.tilt(0.0).divergence();
        }
        self.tilt(self.sigma_for_entropy(rate)).divergence()
    }

    /// Tilt σ ∈ [0, 1] whose tilted distribution has entropy `rate`
    /// (`H(V) ≤ rate ≤ log |V|`).
    pub(crate) fn sigma_for_entropy(&self, rate: f64) -> f64 {
        if rate <= self.entropy() {
            return 1.0;
        }
        if rate >= self.log_alphabet() {
            return 0.0;
        }
        // H(p_σ) decreases in σ
        bisect(|s| self.tilt(s).entropy() > rate, 0.0, 1.0, 1e-15)
    }

    /// Smallest rate `R` with `e(R) ≥ target`. Returns a rate just above
    /// `log |V|` (where `e = ∞`) when `target` exceeds `D(uniform ‖ P)`.
    pub fn rate_for_reliability(&self, target: f64) -> f64 {
        if target <= 0.0 {
            return 0.0;
        }
        let top = self.tilt(0.0).divergence();
        if target > top {
            return self.log_alphabet().next_up();
        }
        // D(p_σ‖p) decreases in σ; keep the end of the bracket that meets the target
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..crate::numeric::BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.tilt(mid).divergence() >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.tilt(lo).entropy()
    }
}

/// Source symbols per channel use, `t = k/n`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SourceChannelRatio(f64);

impl SourceChannelRatio {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(domain("t", t, "t > 0"));
        }
        Ok(SourceChannelRatio(t))
    }

    /// `t = k/n` for finite block lengths.
    pub fn from_lengths(k: usize, n: usize) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(domain("k/n", k as f64 / n.max(1) as f64, "k, n >= 1"));
        }
        Ok(SourceChannelRatio(k as f64 / n as f64))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Binary entropy in bits.
pub fn binary_entropy_bits(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Linear `Es/N0` from an SNR per source bit in dB: `Es/N0 = t·h2(p)·Eb/N0`.
pub fn ebn0_to_esn0(ebn0_db: f64, t: SourceChannelRatio, src: &DiscreteSource) -> Result<f64> {
    let p = src
        .bias()
        .ok_or_else(|| Error::InvalidDistribution("SNR per source bit is defined for binary sources only".into()))?;
    Ok(t.value() * binary_entropy_bits(p) * db_to_linear(ebn0_db))
}

/// Inverse of [`ebn0_to_esn0`], returning Eb/N0 in dB.
pub fn esn0_to_ebn0_db(es_n0: f64, t: SourceChannelRatio, src: &DiscreteSource) -> Result<f64> {
    let p = src
        .bias()
        .ok_or_else(|| Error::InvalidDistribution("SNR per source bit is defined for binary sources only".into()))?;
    Ok(linear_to_db(es_n0 / (t.value() * binary_entropy_bits(p))))
}

//! Monte-Carlo frame error rate of a [`CodecConfig`].
//!
//! Trial `t` draws its source sequence and noise from the ChaCha8 stream `t`
//! of the user seed, so every trial is reproducible on its own and the result
//! does not depend on how trials are scheduled. The same standard-normal noise
//! is rescaled at every SNR point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{CodecConfig, Decision};
use crate::error::{domain, Result};
use crate::par::{self, Execution};
use crate::source::{ebn0_to_esn0, DiscreteSource, SourceChannelRatio};

const Z95: f64 = 1.959_963_984_540_054;
/// Trials per batch of the adaptive stopping rule.
pub const BATCH: u64 = 1000;

/// How a trial ended. The error events are disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Correct,
    /// The sequence fell in the overflow class.
    SourceOverflow,
    /// The decoder of the sequence's own class output something else.
    MlError,
    /// The own-class decoder was right but lost the MAP comparison.
    MapError,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ErrorCounts {
    pub source_overflow: u64,
    pub ml_error: u64,
    pub map_error: u64,
}

impl ErrorCounts {
    pub fn total(&self) -> u64 {
        self.source_overflow + self.ml_error + self.map_error
    }

    fn add(mut self, other: ErrorCounts) -> Self {
        self.source_overflow += other.source_overflow;
        self.ml_error += other.ml_error;
        self.map_error += other.map_error;
        self
    }

    fn from_outcome(o: Outcome) -> Self {
        let mut c = ErrorCounts::default();
        match o {
            Outcome::Correct => {}
            Outcome::SourceOverflow => c.source_overflow = 1,
            Outcome::MlError => c.ml_error = 1,
            Outcome::MapError => c.map_error = 1,
        }
        c
    }
}

/// One point of an SNR sweep: the label reported in the output and the
/// channel's `Es/N0` (linear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub es_n0: f64,
}

impl SnrPoint {
    /// `Es/N0` given in dB.
    pub fn per_symbol(snr_db: f64) -> Self {
        SnrPoint {
            snr_db,
            es_n0: 10f64.powf(snr_db / 10.0),
        }
    }

    /// `Eb/N0` in dB per source information bit, `Es/N0 = (k/n)·h2(p)·Eb/N0`.
    pub fn per_source_bit(ebn0_db: f64, src: &DiscreteSource, k: usize, n: usize) -> Result<Self> {
        let t = SourceChannelRatio::from_lengths(k, n)?;
        Ok(SnrPoint {
            snr_db: ebn0_db,
            es_n0: ebn0_to_esn0(ebn0_db, t, src)?,
        })
    }
}

/// Trial budget and stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Number of trials, or the hard cap in adaptive mode.
    pub max_trials: u64,
    /// Stop after the first batch of [`BATCH`] trials that brings the error
    /// count to this value.
    pub min_errors: Option<u64>,
    pub execution: Execution,
}

impl SimOptions {
    pub fn fixed(trials: u64) -> Self {
        SimOptions {
            max_trials: trials,
            min_errors: None,
            execution: Execution::default(),
        }
    }

    pub fn adaptive(min_errors: u64, max_trials: u64) -> Self {
        SimOptions {
            max_trials,
            min_errors: Some(min_errors),
            execution: Execution::default(),
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub snr_db: f64,
    pub es_n0: f64,
    pub trials: u64,
    pub errors_total: u64,
    pub errors_by_type: ErrorCounts,
    pub fer: f64,
    /// Wilson 95% interval of the FER.
    pub fer_ci95: (f64, f64),
    pub seed: u64,
    /// Adaptive mode hit the trial cap before reaching the error target.
    pub insufficient_errors: bool,
}

/// Wilson score interval for `errors` out of `trials` at 95% confidence.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Everything about one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub source: u64,
    pub class: usize,
    pub received: Vec<f64>,
    pub decision: Decision,
    pub outcome: Outcome,
}

impl CodecConfig {
    /// Source sequence and unit-variance noise of trial `trial`.
    pub fn draw(&self, seed: u64, trial: u64) -> (u64, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let mut word = 0u64;
        for _ in 0..self.k() {
            word = (word << 1) | (rng.gen::<f64>() < self.p()) as u64;
        }
        let noise = (0..self.n()).map(|_| rng.sample(StandardNormal)).collect();
        (word, noise)
    }

    /// Run trial `trial` at this configuration's SNR.
    pub fn run_trial(&self, seed: u64, trial: u64) -> TrialRecord {
        let (source, noise) = self.draw(seed, trial);
        let enc = self.encode_bits(source);
        let sd = self.noise_variance().sqrt();
        let received: Vec<f64> = self
            .modulate(enc.codeword)
            .iter()
            .zip(&noise)
            .map(|(x, z)| x + sd * z)
            .collect();
        let bank = self.ml_decode_bank(&received).expect("block length checked");
        let decision = self.map_select(&bank);
        let outcome = if enc.class == 0 {
            Outcome::SourceOverflow
        } else if bank[enc.class - 1].map(|c| c.word) != Some(source) {
            Outcome::MlError
        } else if decision.class != Some(enc.class) {
            Outcome::MapError
        } else {
            Outcome::Correct
        };
        TrialRecord {
            source,
            class: enc.class,
            received,
            decision,
            outcome,
        }
    }

    fn count(&self, seed: u64, trials: std::ops::Range<u64>, exec: Execution) -> ErrorCounts {
        par::map_reduce(
            exec,
            trials,
            ErrorCounts::default,
            |t| ErrorCounts::from_outcome(self.run_trial(seed, t).outcome),
            ErrorCounts::add,
        )
    }
}

/// Frame error rate at every SNR point.
pub fn simulate_fer(cfg: &CodecConfig, points: &[SnrPoint], opts: SimOptions, seed: u64) -> Result<Vec<SimResult>> {
    if opts.max_trials == 0 {
        return Err(domain("trials", 0.0, "trials >= 1"));
    }
    points
        .iter()
        .map(|pt| {
            let cfg = cfg.clone().with_es_n0(pt.es_n0)?;
            let (trials, counts) = match opts.min_errors {
                None => (opts.max_trials, cfg.count(seed, 0..opts.max_trials, opts.execution)),
                Some(target) => {
                    let mut done = 0;
                    let mut counts = ErrorCounts::default();
                    while done < opts.max_trials && counts.total() < target {
                        let next = (done + BATCH).min(opts.max_trials);
                        counts = counts.add(cfg.count(seed, done..next, opts.execution));
                        done = next;
                    }
                    (done, counts)
                }
            };
            let errors = counts.total();
            Ok(SimResult {
                snr_db: pt.snr_db,
                es_n0: pt.es_n0,
                trials,
                errors_total: errors,
                errors_by_type: counts,
                fer: errors as f64 / trials as f64,
                fer_ci95: wilson_interval(errors, trials),
                seed,
                insufficient_errors: opts.min_errors.is_some_and(|m| errors < m),
            })
        })
        .collect()
}

//! Two-or-more-class source-channel codec for binary sources over the BI-AWGN
//! channel.
//!
//! A source sequence is ranked by the enumerative code, the bit length `L` of
//! its index selects the first code with `L ≤ k_dim`, and the index, padded
//! with leading zeros, is the information word of that code. The receiver runs
//! one exhaustive soft ML decoder per code and keeps the candidate with the
//! largest `log P(v) + log W(y|x(v))`.

mod enumerative;
mod linear;
mod sim;

pub use enumerative::{codeword_length, pack, unpack, Enumerator, MAX_SOURCE_LEN};
pub use linear::{LinearCode, MAX_BLOCK_LEN};
pub use sim::{simulate_fer, wilson_interval, ErrorCounts, Outcome, SimOptions, SimResult, SnrPoint, TrialRecord};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::source::DiscreteSource;

/// Largest code dimension the exhaustive decoders accept.
pub const MAX_CODE_DIM: usize = 22;

/// Candidate set searched by each ML decoder.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderMode {
    /// Only information words that encode a message of the decoder's own
    /// class (the receiver knows that the padding bits are zero).
    #[default]
    ClassRestricted,
    /// All `2^k_dim` codewords; the decoder fails when the winner is not a
    /// message of its class.
    FullCodebook,
}

/// Source, codes and channel quality of a multi-class codec.
#[derive(Debug, Clone)]
pub struct CodecConfig {
    p: f64,
    log_p: f64,
    log_q: f64,
    k: usize,
    n: usize,
    codes: Vec<LinearCode>,
    es_n0: f64,
    mode: DecoderMode,
    enumerator: Enumerator,
}

/// Where a source sequence goes at the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoded {
    /// Class in `0..=N`; 0 is the overflow class.
    pub class: usize,
    pub index: u64,
    pub info: u64,
    /// Codeword bits, channel use `j` in bit `j`.
    pub codeword: u64,
}

/// Output of one class decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub class: usize,
    /// Packed source sequence.
    pub word: u64,
    pub index: u64,
    pub log_likelihood: f64,
    pub log_prior: f64,
}

impl Candidate {
    /// `log q(v, y) = log P(v) + log W(y|x(v))`.
    pub fn map_metric(&self) -> f64 {
        self.log_prior + self.log_likelihood
    }
}

/// Final decision of the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decision {
    pub word: u64,
    /// Winning class, or `None` when every decoder failed and the all-zero
    /// sequence is output.
    pub class: Option<usize>,
}

impl CodecConfig {
    /// `codes` are ordered from the lowest rate (class 1) upwards.
    pub fn new(src: &DiscreteSource, k: usize, codes: Vec<LinearCode>, es_n0: f64) -> Result<Self> {
        let p = src
            .bias()
            .ok_or_else(|| Error::InvalidCodec("the codec needs a binary source".into()))?;
        let enumerator = Enumerator::new(k)?;
        let first = codes
            .first()
            .ok_or_else(|| Error::InvalidCodec("need at least one code".into()))?;
        let n = first.n();
        if codes.iter().any(|c| c.n() != n) {
            return Err(Error::InvalidCodec("all codes must have the same block length".into()));
        }
        if codes.windows(2).any(|w| w[1].k_dim() <= w[0].k_dim()) {
            return Err(Error::InvalidCodec(
                "code dimensions must be strictly increasing".into(),
            ));
        }
        if let Some(c) = codes.iter().find(|c| c.k_dim() > MAX_CODE_DIM) {
            return Err(Error::InvalidCodec(format!(
                "code dimension {} exceeds the exhaustive-decoding cap {MAX_CODE_DIM}",
                c.k_dim()
            )));
        }
        check_es_n0(es_n0)?;
        Ok(CodecConfig {
            p,
            log_p: p.ln(),
            log_q: (1.0 - p).ln(),
            k,
            n,
            codes,
            es_n0,
            mode: DecoderMode::default(),
            enumerator,
        })
    }

    pub fn with_mode(mut self, mode: DecoderMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_es_n0(mut self, es_n0: f64) -> Result<Self> {
        check_es_n0(es_n0)?;
        self.es_n0 = es_n0;
        Ok(self)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> usize {
        self.codes.len()
    }

    pub fn codes(&self) -> &[LinearCode] {
        &self.codes
    }

    pub fn es_n0(&self) -> f64 {
        self.es_n0
    }

    pub fn mode(&self) -> DecoderMode {
        self.mode
    }

    pub fn enumerator(&self) -> &Enumerator {
        &self.enumerator
    }

    /// Noise variance per dimension, `N0/2` with `Es = 1`.
    pub fn noise_variance(&self) -> f64 {
        0.5 / self.es_n0
    }

    /// `log P(v)` of a packed sequence.
    pub fn log_prior(&self, word: u64) -> f64 {
        let w = word.count_ones() as f64;
        w * self.log_p + (self.k as f64 - w) * self.log_q
    }

    /// Class of an enumerative index: the smallest `i` with `L ≤ k_dim_i`, or 0.
    pub fn class_of_index(&self, index: u64) -> usize {
        let len = codeword_length(index) as usize;
        self.codes.iter().position(|c| len <= c.k_dim()).map_or(0, |i| i + 1)
    }

    pub fn assign_class(&self, word: u64) -> usize {
        self.class_of_index(self.enumerator.index(word))
    }

    /// Indices `[lo, hi)` of the messages in class `i ≥ 1`.
    pub fn class_index_range(&self, i: usize) -> (u64, u64) {
        let lo = if i == 1 { 0 } else { 1u64 << self.codes[i - 2].k_dim() };
        let hi = (1u64 << self.codes[i - 1].k_dim()).min(self.enumerator.count());
        (lo.min(hi), hi)
    }

    pub fn encode_bits(&self, word: u64) -> Encoded {
        let index = self.enumerator.index(word);
        let class = self.class_of_index(index);
        let (info, code) = if class == 0 {
            (0, &self.codes[0])
        } else {
            (index, &self.codes[class - 1])
        };
        Encoded {
            class,
            index,
            info,
            codeword: code.encode(info),
        }
    }

    /// Antipodal channel input, bit 0 ↦ +1 and bit 1 ↦ −1 (`Es = 1`).
    pub fn modulate(&self, codeword: u64) -> Vec<f64> {
        (0..self.n)
            .map(|j| if (codeword >> j) & 1 == 1 { -1.0 } else { 1.0 })
            .collect()
    }

    pub fn encode(&self, word: u64) -> Vec<f64> {
        self.modulate(self.encode_bits(word).codeword)
    }

    /// `log W(y|x)` of a codeword.
    pub fn log_likelihood(&self, y: &[f64], codeword: u64) -> f64 {
        let var = self.noise_variance();
        let dist: f64 = y
            .iter()
            .enumerate()
            .map(|(j, &yj)| {
                let s = if (codeword >> j) & 1 == 1 { -1.0 } else { 1.0 };
                (yj - s) * (yj - s)
            })
            .sum();
        -dist / (2.0 * var) - 0.5 * self.n as f64 * (2.0 * PI * var).ln()
    }

    fn check_received(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.n {
            return Err(Error::InvalidCodec(format!(
                "received {} samples, block length is {}",
                y.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// One ML decoder per class; `None` marks a failed decoder.
    ///
    /// Ties are broken towards the smallest index.
    pub fn ml_decode_bank(&self, y: &[f64]) -> Result<Vec<Option<Candidate>>> {
        self.check_received(y)?;
        let table = CorrelationTable::new(y);
        Ok((1..=self.classes()).map(|i| self.ml_decode(i, y, &table)).collect())
    }

    fn ml_decode(&self, i: usize, y: &[f64], table: &CorrelationTable) -> Option<Candidate> {
        let code = &self.codes[i - 1];
        let (lo, hi) = self.class_index_range(i);
        let (search_lo, search_hi) = match self.mode {
            DecoderMode::ClassRestricted => (lo, hi),
            DecoderMode::FullCodebook => (0, 1u64 << code.k_dim()),
        };
        if search_lo >= search_hi {
            return None;
        }
        // Gray-code walk over all information words, one row XOR per step
        let mut best: Option<(f64, u64)> = None;
        let mut codeword = 0u64;
        let total = 1u64 << code.k_dim();
        for step in 0..total {
            if step > 0 {
                codeword ^= code.row_for_bit(step.trailing_zeros() as usize);
            }
            let u = step ^ (step >> 1);
            if u < search_lo || u >= search_hi {
                continue;
            }
            let corr = table.correlation(codeword);
            best = match best {
                Some((c, b)) if c > corr || (c == corr && b < u) => Some((c, b)),
                _ => Some((corr, u)),
            };
        }
        let (_, index) = best?;
        if index < lo || index >= hi {
            return None;
        }
        let word = self.enumerator.invert(index).ok()?;
        Some(Candidate {
            class: i,
            word,
            index,
            log_likelihood: self.log_likelihood(y, code.encode(index)),
            log_prior: self.log_prior(word),
        })
    }

    /// MAP choice among the bank outputs; ties go to the lowest class.
    pub fn map_select(&self, bank: &[Option<Candidate>]) -> Decision {
        let best = bank.iter().flatten().fold(None::<&Candidate>, |acc, c| match acc {
            Some(b) if b.map_metric() >= c.map_metric() => Some(b),
            _ => Some(c),
        });
        match best {
            Some(c) => Decision {
                word: c.word,
                class: Some(c.class),
            },
            None => Decision { word: 0, class: None },
        }
    }

    pub fn decode(&self, y: &[f64]) -> Result<Decision> {
        Ok(self.map_select(&self.ml_decode_bank(y)?))
    }
}

fn check_es_n0(es_n0: f64) -> Result<()> {
    if !(es_n0 > 0.0 && es_n0.is_finite()) {
        return Err(domain("es_n0", es_n0, "0 < Es/N0 < inf"));
    }
    Ok(())
}

/// Byte-sliced lookup of `Σ_j y_j s_j` for packed codewords.
struct CorrelationTable {
    tables: Vec<[f64; 256]>,
}

impl CorrelationTable {
    fn new(y: &[f64]) -> Self {
        let tables = y
            .chunks(8)
            .map(|chunk| {
                let mut t = [0.0; 256];
                for (byte, entry) in t.iter_mut().enumerate() {
                    *entry = chunk
                        .iter()
                        .enumerate()
                        .map(|(j, &yj)| if (byte >> j) & 1 == 1 { -yj } else { yj })
                        .sum();
                }
                t
            })
            .collect();
        CorrelationTable { tables }
    }

    fn correlation(&self, codeword: u64) -> f64 {
        self.tables
            .iter()
            .enumerate()
            .map(|(b, t)| t[((codeword >> (8 * b)) & 0xff) as usize])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_class(p: f64, k: usize, n: usize, dims: (usize, usize), seed: u64) -> CodecConfig {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let codes = vec![
            LinearCode::random(n, dims.0, &mut rng).unwrap(),
            LinearCode::random(n, dims.1, &mut rng).unwrap(),
        ];
        CodecConfig::new(&DiscreteSource::bernoulli(p).unwrap(), k, codes, 1.0).unwrap()
    }

    #[test]
    fn validates_configuration() {
        let src = DiscreteSource::bernoulli(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = LinearCode::random(16, 8, &mut rng).unwrap();
        let b = LinearCode::random(16, 8, &mut rng).unwrap();
        let c = LinearCode::random(20, 10, &mut rng).unwrap();
        let big = LinearCode::random(30, 23, &mut rng).unwrap();
        assert!(CodecConfig::new(&src, 16, vec![], 1.0).is_err());
        assert!(CodecConfig::new(&src, 16, vec![a.clone(), b], 1.0).is_err());
        assert!(CodecConfig::new(&src, 16, vec![a.clone(), c], 1.0).is_err());
        assert!(CodecConfig::new(&src, 16, vec![big], 1.0).is_err());
        assert!(CodecConfig::new(&src, 16, vec![a.clone()], 0.0).is_err());
        let ternary = DiscreteSource::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!(CodecConfig::new(&ternary, 16, vec![a], 1.0).is_err());
    }

    #[test]
    fn class_boundaries() {
        let cfg = two_class(0.1, 16, 16, (8, 12), 3);
        let e = cfg.enumerator();
        assert_eq!(cfg.assign_class(0), 1);
        // L = 8 is the largest index below 2^8, L = 9 starts at 2^8
        assert_eq!(cfg.assign_class(e.invert(255).unwrap()), 1);
        assert_eq!(cfg.assign_class(e.invert(256).unwrap()), 2);
        assert_eq!(cfg.assign_class(e.invert(4095).unwrap()), 2);
        assert_eq!(cfg.assign_class(e.invert(4096).unwrap()), 0);
        assert_eq!(cfg.assign_class(0xffff), 0);
        assert_eq!(cfg.class_index_range(1), (0, 256));
        assert_eq!(cfg.class_index_range(2), (256, 4096));
    }

    #[test]
    fn overflow_messages_share_the_fixed_codeword() {
        let cfg = two_class(0.1, 16, 16, (8, 12), 3);
        let x0 = cfg.encode(0);
        assert!(x0.iter().all(|&x| x == 1.0));
        for word in [0xffffu64, 0xfff0, 0x0fff] {
            assert_eq!(cfg.assign_class(word), 0);
            assert_eq!(cfg.encode(word), x0);
        }
    }

    #[test]
    fn noiseless_round_trip() {
        let cfg = two_class(0.2, 16, 16, (8, 12), 9).with_es_n0(1e6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mut checked, mut collisions) = (0, 0);
        while checked < 1000 {
            let word = rng.gen::<u64>() & 0xffff;
            let enc = cfg.encode_bits(word);
            if enc.class == 0 {
                continue;
            }
            let y = cfg.modulate(enc.codeword);
            let bank = cfg.ml_decode_bank(&y).unwrap();
            let own = bank[enc.class - 1].unwrap();
            assert_eq!(own.word, word);
            let d = cfg.map_select(&bank);
            if d.word != word {
                // the two codes share this codeword and the other message is
                // more probable, or equally probable in a lower class
                let c = bank[d.class.unwrap() - 1].unwrap();
                assert_eq!(cfg.encode_bits(c.word).codeword, enc.codeword);
                let prior = cfg.log_prior(word);
                assert!(c.log_prior > prior || (c.log_prior == prior && c.class < enc.class));
                collisions += 1;
            } else {
                assert_eq!(d.class, Some(enc.class));
            }
            checked += 1;
        }
        assert!(collisions < 100);
    }

    #[test]
    fn zero_observation_ties_go_to_smallest_index() {
        let cfg = two_class(0.1, 16, 16, (8, 12), 3);
        let bank = cfg.ml_decode_bank(&[0.0; 16]).unwrap();
        assert_eq!(bank[0].unwrap().index, 0);
        assert_eq!(bank[1].unwrap().index, 256);
        // equal likelihoods: the larger prior (class 1, all-zero) wins
        assert_eq!(
            cfg.map_select(&bank),
            Decision {
                word: 0,
                class: Some(1)
            }
        );
    }

    #[test]
    fn map_prefers_prior_over_small_likelihood_gain() {
        let cfg = two_class(0.05, 16, 16, (8, 12), 4);
        let c1 = Candidate {
            class: 1,
            word: 0,
            index: 0,
            log_likelihood: -10.0,
            log_prior: cfg.log_prior(0),
        };
        let w2 = cfg.enumerator().invert(3000).unwrap();
        let c2 = Candidate {
            class: 2,
            word: w2,
            index: 3000,
            log_likelihood: -9.0,
            log_prior: cfg.log_prior(w2),
        };
        assert!(c2.log_likelihood > c1.log_likelihood && c1.map_metric() > c2.map_metric());
        assert_eq!(cfg.map_select(&[Some(c1), Some(c2)]).class, Some(1));
        assert_eq!(cfg.map_select(&[None, Some(c2)]).class, Some(2));
        assert_eq!(cfg.map_select(&[None, None]), Decision { word: 0, class: None });
    }

    #[test]
    fn single_class_map_is_ml() {
        let src = DiscreteSource::bernoulli(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = CodecConfig::new(&src, 12, vec![LinearCode::random(16, 12, &mut rng).unwrap()], 0.8).unwrap();
        for _ in 0..50 {
            let y: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let bank = cfg.ml_decode_bank(&y).unwrap();
            assert_eq!(cfg.map_select(&bank).word, bank[0].unwrap().word);
        }
    }

    #[test]
    fn bank_matches_per_class_scan_of_sequences() {
        // oracle: enumerate every source sequence, encode it and keep the
        // closest codeword inside each class
        let cfg = two_class(0.15, 12, 16, (6, 10), 21);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let y: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let mut best = vec![(f64::NEG_INFINITY, 0u64); 2];
            for word in 0..1u64 << 12 {
                let class = cfg.assign_class(word);
                if class == 0 {
                    continue;
                }
                let ll = cfg.log_likelihood(&y, cfg.encode_bits(word).codeword);
                if ll > best[class - 1].0 {
                    best[class - 1] = (ll, word);
                }
            }
            let bank = cfg.ml_decode_bank(&y).unwrap();
            for i in 0..2 {
                let c = bank[i].unwrap();
                assert_eq!(c.word, best[i].1);
                assert!((c.log_likelihood - best[i].0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn full_codebook_mode_can_fail() {
        // k_dim above the source length: some information words are no message
        let src = DiscreteSource::bernoulli(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let codes = vec![
            LinearCode::random(16, 4, &mut rng).unwrap(),
            LinearCode::random(16, 10, &mut rng).unwrap(),
        ];
        let cfg = CodecConfig::new(&src, 8, codes, 1.0)
            .unwrap()
            .with_mode(DecoderMode::FullCodebook);
        let restricted = cfg.clone().with_mode(DecoderMode::ClassRestricted);
        let mut failures = 0;
        for _ in 0..200 {
            let y: Vec<f64> = (0..16).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let full = cfg.ml_decode_bank(&y).unwrap();
            let res = restricted.ml_decode_bank(&y).unwrap();
            assert!(res.iter().all(|c| c.is_some()));
            for (f, r) in full.iter().zip(&res) {
                match f {
                    None => failures += 1,
                    Some(f) => assert_eq!(f, r.as_ref().unwrap()),
                }
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn empty_class_is_marked_failed() {
        let src = DiscreteSource::bernoulli(0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let codes = vec![
            LinearCode::random(16, 8, &mut rng).unwrap(),
            LinearCode::random(16, 10, &mut rng).unwrap(),
        ];
        let cfg = CodecConfig::new(&src, 8, codes, 1.0).unwrap();
        let bank = cfg.ml_decode_bank(&[0.5; 16]).unwrap();
        assert!(bank[0].is_some() && bank[1].is_none());
        assert!(cfg.ml_decode_bank(&[0.5; 15]).is_err());
    }
}

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use mcjscc::codec::{LinearCode, MAX_CODE_DIM};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: SourceConfig,
    pub ratio: RatioConfig,
    pub channel: ChannelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeConfig>,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub p: f64,
}

/// Either the asymptotic ratio `t` or the block lengths `k` and `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatioConfig {
    Lengths { k: usize, n: usize },
    Ratio { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelType {
    BiAwgn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrConvention {
    /// `Eb/N0` per source information bit.
    PerSourceBit,
    /// `Es/N0` per channel symbol.
    PerChannelSymbol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(rename = "type")]
    pub kind: ChannelType,
    pub sweep: Sweep,
    pub snr_convention: SnrConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        if self.start_db == self.stop_db {
            return vec![self.start_db];
        }
        let count = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start_db + i as f64 * self.step_db).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    /// Class counts `N` evaluated by `exponents` and `rates`.
    #[serde(default = "default_classes")]
    pub classes: Vec<usize>,
    /// Fixed class rates in bits per channel use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates_bits: Option<Vec<f64>>,
    /// Fixed per-symbol log-probability thresholds in nats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
    /// Generator matrix files, one per coded class.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub code_files: Vec<PathBuf>,
    /// Dimensions of random codes drawn when no files are given.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub random_code_dims: Vec<usize>,
    #[serde(default)]
    pub code_seed: u64,
}

fn default_classes() -> Vec<usize> {
    vec![2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Stop each point once this many errors are seen; `trials` is then the cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_errors: Option<u64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: 10_000,
            seed: 0,
            min_errors: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| anyhow::anyhow!("config parse error at line {}, column {}: {e}", e.line(), e.column()))
    }

    /// Reads a config; relative code file paths are resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::from_json(&text).with_context(|| format!("in {}", path.display()))?;
        if let (Some(dir), Some(scheme)) = (path.parent(), cfg.scheme.as_mut()) {
            for f in &mut scheme.code_files {
                if f.is_relative() {
                    *f = dir.join(&*f);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.source.p;
        ensure!(p > 0.0 && p < 1.0, "source.p = {p} must lie in (0, 1)");
        match self.ratio {
            RatioConfig::Ratio { t } => ensure!(t.is_finite() && t > 0.0, "ratio.t = {t} must be positive"),
            RatioConfig::Lengths { k, n } => ensure!(k > 0 && n > 0, "ratio.k and ratio.n must be positive"),
        }
        let s = &self.channel.sweep;
        ensure!(
            s.start_db.is_finite() && s.stop_db.is_finite() && s.step_db.is_finite(),
            "channel.sweep values must be finite"
        );
        ensure!(s.stop_db >= s.start_db, "channel.sweep is empty: stop_db < start_db");
        ensure!(
            s.step_db > 0.0 || s.start_db == s.stop_db,
            "channel.sweep.step_db must be positive"
        );
        ensure!(s.points().len() <= 100_000, "channel.sweep has too many points");
        ensure!(self.sim.trials > 0, "sim.trials must be positive");
        if let Some(scheme) = &self.scheme {
            ensure!(!scheme.classes.is_empty(), "scheme.classes is empty");
            ensure!(
                scheme.classes.iter().all(|&n| n >= 1),
                "scheme.classes entries must be at least 1"
            );
            ensure!(
                !(scheme.rates_bits.is_some() && scheme.thresholds.is_some()),
                "scheme: give rates_bits or thresholds, not both"
            );
            ensure!(
                scheme.code_files.is_empty() || scheme.random_code_dims.is_empty(),
                "scheme: give code_files or random_code_dims, not both"
            );
            for f in &scheme.code_files {
                ensure!(f.is_file(), "scheme.code_files: {} does not exist", f.display());
            }
            if let Some(&d) = scheme.random_code_dims.iter().find(|&&d| d > MAX_CODE_DIM) {
                bail!("scheme.random_code_dims: dimension {d} exceeds the decoding cap {MAX_CODE_DIM}");
            }
        }
        Ok(())
    }

    pub fn lengths(&self) -> Result<(usize, usize)> {
        match self.ratio {
            RatioConfig::Lengths { k, n } => Ok((k, n)),
            RatioConfig::Ratio { .. } => bail!("this command needs ratio.k and ratio.n, not ratio.t"),
        }
    }

    pub fn t(&self) -> f64 {
        match self.ratio {
            RatioConfig::Lengths { k, n } => k as f64 / n as f64,
            RatioConfig::Ratio { t } => t,
        }
    }

    pub fn class_counts(&self) -> Vec<usize> {
        self.scheme.as_ref().map_or_else(default_classes, |s| s.classes.clone())
    }

    /// Codes of the simulated scheme, from files or drawn at random.
    pub fn codes(&self) -> Result<Vec<LinearCode>> {
        let (_, n) = self.lengths()?;
        let scheme = self
            .scheme
            .as_ref()
            .context("simulation needs a scheme with code_files or random_code_dims")?;
        if !scheme.code_files.is_empty() {
            return scheme
                .code_files
                .iter()
                .map(|f| {
                    let text = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
                    LinearCode::parse(&text).with_context(|| format!("in {}", f.display()))
                })
                .collect();
        }
        ensure!(
            !scheme.random_code_dims.is_empty(),
            "simulation needs a scheme with code_files or random_code_dims"
        );
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(scheme.code_seed);
        scheme
            .random_code_dims
            .iter()
            .map(|&d| LinearCode::random(n, d, &mut rng).map_err(Into::into))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{
                "source": {"p": 0.1},
                "ratio": {"k": 16, "n": 16},
                "channel": {"type": "bi_awgn",
                            "sweep": {"start_db": 2, "stop_db": 4, "step_db": 0.5},
                            "snr_convention": "per_source_bit"},
                "scheme": {"classes": [2, 3], "random_code_dims": [8, 12], "code_seed": 5},
                "sim": {"trials": 1000, "seed": 9, "min_errors": 50},
                "output": {"format": "json"}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let cfg = sample();
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.to_json(), again.to_json());

        let t = ExperimentConfig {
            ratio: RatioConfig::Ratio { t: 0.8 },
            scheme: None,
            ..cfg
        };
        assert_eq!(ExperimentConfig::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn sweep_points_include_the_stop_value() {
        let s = Sweep {
            start_db: 1.0,
            stop_db: 8.0,
            step_db: 0.25,
        };
        let pts = s.points();
        assert_eq!(pts.len(), 29);
        assert!((pts[28] - 8.0).abs() < 1e-12);
        let single = Sweep {
            start_db: 6.0,
            stop_db: 6.0,
            step_db: 0.0,
        };
        assert_eq!(single.points(), vec![6.0]);
    }

    #[test]
    fn validation_failures() {
        let mut cfg = sample();
        cfg.source.p = 1.5;
        assert!(cfg.validate().is_err());

        let mut cfg = sample();
        cfg.channel.sweep.stop_db = 1.0;
        assert!(cfg.validate().is_err());

        let mut cfg = sample();
        let s = cfg.scheme.as_mut().unwrap();
        s.rates_bits = Some(vec![0.5, 0.4]);
        s.thresholds = Some(vec![-0.5]);
        assert!(cfg.validate().is_err());

        let mut cfg = sample();
        cfg.scheme.as_mut().unwrap().random_code_dims = vec![8, 30];
        assert!(cfg.validate().is_err());

        let mut cfg = sample();
        cfg.scheme.as_mut().unwrap().random_code_dims.clear();
        cfg.scheme.as_mut().unwrap().code_files = vec!["/nonexistent/g.txt".into()];
        assert!(cfg.validate().is_err());

        assert!(sample().validate().is_ok());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = ExperimentConfig::from_json("{\n \"source\": {\"p\": 0.1},\n \"bogus\": 1\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}

use std::f64::consts::LN_2;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use mcjscc::codec::{simulate_fer, CodecConfig, SimOptions, SimResult, SnrPoint};
use mcjscc::par;
use mcjscc::partition::PartitionSpec;
use mcjscc::source::{db_to_linear, ebn0_to_esn0};
use mcjscc::sphere::{two_class_lower_bound_with, BoundOptions};
use mcjscc::{ChannelSpec, DiscreteSource, Execution, ExponentSuite, SourceChannelRatio};

use crate::config::{ExperimentConfig, SnrConvention};
use crate::output::{num, Table};

fn source(cfg: &ExperimentConfig) -> Result<DiscreteSource> {
    Ok(DiscreteSource::bernoulli(cfg.source.p)?)
}

fn ratio(cfg: &ExperimentConfig) -> Result<SourceChannelRatio> {
    Ok(SourceChannelRatio::new(cfg.t())?)
}

/// Channel `Es/N0` (linear) of a sweep label in dB.
fn es_n0(cfg: &ExperimentConfig, db: f64) -> Result<f64> {
    match cfg.channel.snr_convention {
        SnrConvention::PerSourceBit => Ok(ebn0_to_esn0(db, ratio(cfg)?, &source(cfg)?)?),
        SnrConvention::PerChannelSymbol => Ok(db_to_linear(db)),
    }
}

fn suite(cfg: &ExperimentConfig, db: f64) -> Result<ExponentSuite> {
    let channel = ChannelSpec::bi_awgn(es_n0(cfg, db)?)?;
    Ok(ExponentSuite::new(&source(cfg)?, &channel, ratio(cfg)?)?)
}

fn bits(rates: &[f64]) -> String {
    rates
        .iter()
        .map(|r| (r / LN_2).to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Class rates of the fixed partition, in nats.
fn fixed_rates(cfg: &ExperimentConfig) -> Result<Option<Vec<f64>>> {
    let Some(scheme) = &cfg.scheme else { return Ok(None) };
    let (src, t) = (source(cfg)?, ratio(cfg)?);
    if let Some(r) = &scheme.rates_bits {
        let nats = r.iter().map(|b| b * LN_2).collect();
        return Ok(Some(PartitionSpec::from_rates(&src, t, nats)?.rates().to_vec()));
    }
    if let Some(g) = &scheme.thresholds {
        return Ok(Some(
            PartitionSpec::from_thresholds(&src, t, g.clone())?.rates().to_vec(),
        ));
    }
    Ok(None)
}

pub fn exponents(cfg: &ExperimentConfig, exec: Execution) -> Result<Table> {
    let classes = cfg.class_counts();
    let two_rate: Vec<usize> = classes.iter().copied().filter(|&n| n >= 2).collect();
    let fixed = fixed_rates(cfg)?;
    let mut headers: Vec<String> = ["ebn0_db", "e_sep", "e_joint", "e_hull"].map(String::from).to_vec();
    headers.extend(classes.iter().map(|n| format!("e_thm1_{n}")));
    headers.extend(two_rate.iter().map(|n| format!("e_thm2_{n}")));
    if fixed.is_some() {
        headers.push("e_thm1_fixed".into());
    }
    headers.push("r_sep_bits".into());
    headers.extend(classes.iter().map(|n| format!("r_thm1_{n}_bits")));
    for n in &two_rate {
        headers.push(format!("r_thm2_{n}_bits"));
        headers.push(format!("rp_thm2_{n}_bits"));
    }
    let points = cfg.channel.sweep.points();
    let rows = par::map(exec, &points, |&db| -> Result<Vec<Value>> {
        let s = suite(cfg, db)?;
        let sep = s.separate()?;
        let thm1 = classes.iter().map(|&n| s.thm1(n)).collect::<mcjscc::Result<Vec<_>>>()?;
        let thm2 = two_rate
            .iter()
            .map(|&n| s.thm2(n))
            .collect::<mcjscc::Result<Vec<_>>>()?;
        let mut row = vec![
            num(db),
            num(sep.value),
            num(s.joint()?.value),
            num(s.joint_hull()?.value),
        ];
        row.extend(thm1.iter().map(|r| num(r.value)));
        row.extend(thm2.iter().map(|r| num(r.value)));
        if let Some(rates) = &fixed {
            row.push(num(s.thm1_at(rates)?.value));
        }
        row.push(Value::String(bits(&sep.argmax.rates)));
        row.extend(thm1.iter().map(|r| Value::String(bits(&r.argmax.rates))));
        for r in &thm2 {
            row.push(num(r.argmax.rates[0] / LN_2));
            row.push(num(r.argmax.rates[1] / LN_2));
        }
        Ok(row)
    });
    let mut table = Table::new(headers);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

pub fn rates(cfg: &ExperimentConfig, exec: Execution) -> Result<Table> {
    let classes = cfg.class_counts();
    ensure!(
        classes.iter().all(|&n| n >= 2),
        "rates needs scheme.classes entries of at least 2"
    );
    let headers = [
        "ebn0_db", "classes", "r_bits", "rp_bits", "r_nats", "rp_nats", "exponent",
    ];
    let points = cfg.channel.sweep.points();
    let rows = par::map(exec, &points, |&db| -> Result<Vec<Vec<Value>>> {
        let s = suite(cfg, db)?;
        classes
            .iter()
            .map(|&n| {
                let best = s.thm2(n)?;
                let (r, rp) = (best.argmax.rates[0], best.argmax.rates[1]);
                Ok(vec![
                    num(db),
                    json!(n),
                    num(round3(r / LN_2)),
                    num(round3(rp / LN_2)),
                    num(r),
                    num(rp),
                    num(best.value),
                ])
            })
            .collect()
    });
    let mut table = Table::new(headers.map(String::from).to_vec());
    for group in rows {
        for row in group? {
            table.push(row);
        }
    }
    Ok(table)
}

/// Parameters a simulation result is tied to; a bound can only be joined
/// with a simulation of the same source and block lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMeta {
    pub k: usize,
    pub n: usize,
    pub p: f64,
    pub snr_convention: SnrConvention,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimOutput {
    #[serde(flatten)]
    pub meta: SimMeta,
    pub results: Vec<SimResult>,
}

pub fn sim_points(cfg: &ExperimentConfig) -> Result<Vec<SnrPoint>> {
    cfg.channel
        .sweep
        .points()
        .into_iter()
        .map(|db| {
            Ok(SnrPoint {
                snr_db: db,
                es_n0: es_n0(cfg, db)?,
            })
        })
        .collect()
}

pub fn simulate(cfg: &ExperimentConfig, exec: Execution) -> Result<SimOutput> {
    let (k, n) = cfg.lengths()?;
    let codes = cfg.codes()?;
    let codec = CodecConfig::new(&source(cfg)?, k, codes, 1.0)?;
    let opts = match cfg.sim.min_errors {
        Some(m) => SimOptions::adaptive(m, cfg.sim.trials),
        None => SimOptions::fixed(cfg.sim.trials),
    }
    .with_execution(exec);
    let results = simulate_fer(&codec, &sim_points(cfg)?, opts, cfg.sim.seed)?;
    Ok(SimOutput {
        meta: SimMeta {
            k,
            n,
            p: cfg.source.p,
            snr_convention: cfg.channel.snr_convention,
            seed: cfg.sim.seed,
        },
        results,
    })
}

pub fn sim_table(results: &[SimResult]) -> Table {
    let headers = [
        "snr_db", "trials", "fer", "ci_lo", "ci_hi", "e_s", "e_ml", "e_map", "seed",
    ];
    let mut table = Table::new(headers.map(String::from).to_vec());
    for r in results {
        table.push(vec![
            num(r.snr_db),
            json!(r.trials),
            num(r.fer),
            num(r.fer_ci95.0),
            num(r.fer_ci95.1),
            json!(r.errors_by_type.source_overflow),
            json!(r.errors_by_type.ml_error),
            json!(r.errors_by_type.map_error),
            json!(r.seed),
        ]);
    }
    table
}

pub fn bound(cfg: &ExperimentConfig, exec: Execution) -> Result<Table> {
    let (k, n) = cfg.lengths()?;
    let headers = ["ebn0_db", "bound", "w1_opt", "w2_opt", "r1_bits", "r2_bits"];
    let opts = BoundOptions {
        execution: exec,
        ..Default::default()
    };
    let mut table = Table::new(headers.map(String::from).to_vec());
    for pt in sim_points(cfg)? {
        let b = two_class_lower_bound_with(k, n, cfg.source.p, pt.es_n0, opts)?;
        table.push(vec![
            num(pt.snr_db),
            num(b.value),
            json!(b.w1),
            json!(b.w2),
            num(b.r1_bits),
            num(b.r2_bits),
        ]);
    }
    Ok(table)
}

/// Simulated FER rows read back from a `simulate` output.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRows {
    pub meta: SimMeta,
    /// `(snr_db, fer, ci_lo, ci_hi)`.
    pub rows: Vec<(f64, f64, f64, f64)>,
}

pub fn meta_path(out: &Path) -> std::path::PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    s.into()
}

/// Loads a `simulate` output: JSON carries its own parameters, CSV is read
/// together with the `.meta.json` file written next to it.
pub fn load_sim(path: &Path) -> Result<SimRows> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        #[derive(Deserialize)]
        struct Row {
            snr_db: f64,
            fer: f64,
            fer_ci95: (f64, f64),
        }
        #[derive(Deserialize)]
        struct File {
            #[serde(flatten)]
            meta: SimMeta,
            results: Vec<Row>,
        }
        let f: File = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let rows = f
            .results
            .iter()
            .map(|r| (r.snr_db, r.fer, r.fer_ci95.0, r.fer_ci95.1))
            .collect();
        return Ok(SimRows { meta: f.meta, rows });
    }
    let mp = meta_path(path);
    let meta_text = std::fs::read_to_string(&mp)
        .with_context(|| format!("{} has no parameter file {}", path.display(), mp.display()))?;
    let meta: SimMeta = serde_json::from_str(&meta_text).with_context(|| format!("parsing {}", mp.display()))?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("{} lacks column {name}", path.display()))
    };
    let (snr, fer, lo, hi) = (col("snr_db")?, col("fer")?, col("ci_lo")?, col("ci_hi")?);
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let get = |c: usize| -> Result<f64> {
            rec[c]
                .parse()
                .with_context(|| format!("{} line {}: bad number {:?}", path.display(), i + 2, &rec[c]))
        };
        rows.push((get(snr)?, get(fer)?, get(lo)?, get(hi)?));
    }
    Ok(SimRows { meta, rows })
}

/// Pairs each bound row with the simulated point at the same SNR and flags
/// rows where the simulated FER falls below the bound.
pub fn join(cfg: &ExperimentConfig, bound: &Table, sim: &SimRows) -> Result<(Table, usize)> {
    let (k, n) = cfg.lengths()?;
    let m = &sim.meta;
    if m.k != k || m.n != n || m.p != cfg.source.p {
        bail!(
            "simulation has (k, n, p) = ({}, {}, {}) but the bound uses ({k}, {n}, {})",
            m.k,
            m.n,
            m.p,
            cfg.source.p
        );
    }
    ensure!(
        m.snr_convention == cfg.channel.snr_convention,
        "simulation and bound use different SNR conventions"
    );
    let headers = ["ebn0_db", "bound", "fer", "ci_lo", "ci_hi", "violation"];
    let mut table = Table::new(headers.map(String::from).to_vec());
    let mut violations = 0;
    for row in &bound.rows {
        let db = row[0].as_f64().context("bound row without SNR")?;
        let b = row[1].as_f64().context("bound row without value")?;
        let Some(&(_, fer, lo, hi)) = sim.rows.iter().find(|r| (r.0 - db).abs() < 1e-9) else {
            continue;
        };
        let bad = fer < b;
        violations += bad as usize;
        table.push(vec![num(db), num(b), num(fer), num(lo), num(hi), json!(bad as u8)]);
    }
    ensure!(
        !table.rows.is_empty(),
        "no SNR point is shared by the bound and the simulation"
    );
    Ok((table, violations))
}

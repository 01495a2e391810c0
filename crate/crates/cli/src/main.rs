use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use mcjscc::Execution;
use mcjscc_cli::commands::{self, meta_path};
use mcjscc_cli::config::{ExperimentConfig, Format};
use mcjscc_cli::output::{emit, write_atomic};

#[derive(Parser)]
#[command(
    name = "mcjscc",
    version,
    about = "Multi-class joint source-channel coding experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error exponents of every bound over the SNR sweep.
    Exponents(Common),
    /// Optimal two-rate class rates over the SNR sweep.
    Rates(Common),
    /// Frame error rate of the class-partitioned codec.
    Simulate(Common),
    /// Two-class sphere-packing lower bound, optionally joined with a simulation.
    Bound {
        #[command(flatten)]
        common: Common,
        /// Output of `simulate` (CSV with its .meta.json, or JSON) to compare against.
        #[arg(long, requires = "join_out")]
        join: Option<PathBuf>,
        /// Where the joined table goes.
        #[arg(long, requires = "join")]
        join_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn load(&self) -> Result<(ExperimentConfig, Execution)> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.sim.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.clone());
        }
        if let Some(format) = self.format {
            cfg.output.format = format;
        }
        cfg.validate().context("invalid configuration")?;
        let exec = match self.threads {
            Some(0) => bail!("--threads must be at least 1"),
            Some(1) => Execution::Sequential,
            Some(t) => {
                rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
                Execution::Parallel
            }
            None => Execution::Parallel,
        };
        Ok((cfg, exec))
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Exponents(c) => {
            let (cfg, exec) = c.load()?;
            let table = commands::exponents(&cfg, exec)?;
            emit(cfg.output.path.as_deref(), &table.render(cfg.output.format)?)?;
        }
        Command::Rates(c) => {
            let (cfg, exec) = c.load()?;
            let table = commands::rates(&cfg, exec)?;
            emit(cfg.output.path.as_deref(), &table.render(cfg.output.format)?)?;
        }
        Command::Simulate(c) => {
            let (cfg, exec) = c.load()?;
            let out = commands::simulate(&cfg, exec)?;
            for r in out.results.iter().filter(|r| r.insufficient_errors) {
                eprintln!(
                    "warning: {} dB stopped at the trial cap with {} errors (insufficient errors)",
                    r.snr_db, r.errors_total
                );
            }
            let text = match cfg.output.format {
                Format::Csv => commands::sim_table(&out.results).to_csv()?,
                Format::Json => serde_json::to_string_pretty(&out)? + "\n",
            };
            if let (Format::Csv, Some(path)) = (cfg.output.format, &cfg.output.path) {
                write_atomic(&meta_path(path), &(serde_json::to_string_pretty(&out.meta)? + "\n"))?;
            }
            emit(cfg.output.path.as_deref(), &text)?;
        }
        Command::Bound { common, join, join_out } => {
            let (cfg, exec) = common.load()?;
            let sim = join.as_deref().map(commands::load_sim).transpose()?;
            let table = commands::bound(&cfg, exec)?;
            emit(cfg.output.path.as_deref(), &table.render(cfg.output.format)?)?;
            if let (Some(sim), Some(path)) = (sim, join_out) {
                let (joined, violations) = commands::join(&cfg, &table, &sim)?;
                write_atomic(&path, &joined.render(cfg.output.format)?)?;
                if violations > 0 {
                    eprintln!("error: simulated FER is below the bound at {violations} SNR point(s)");
                    return Ok(ExitCode::from(3));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

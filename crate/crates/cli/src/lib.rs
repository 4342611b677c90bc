//! Command-line driver: `run`, `benchmark`, `landscape`, `costmodel` and
//! `validate-config`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{load, output_dir, BenchmarkConfig, CostModelConfig, LandscapeConfig, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "emtauc", version, about = "Evolutionary multitasking AUC optimization")]
pub struct Cli {
    /// Worker threads for benchmark cells and batch evaluations (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize one dataset and write manifest.json and trace.csv.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        sampling_rate: Option<f64>,
        #[arg(long, conflicts_with = "no_adjust")]
        delta: Option<u32>,
        /// Disable dynamic adjustment of the cheap task.
        #[arg(long)]
        no_adjust: bool,
        #[arg(long)]
        trace_stride: Option<u32>,
    },
    /// Repeated stratified k-fold comparison; writes summary.csv and cells/.
    Benchmark {
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        folds: Option<usize>,
    },
    /// Rank correlation between cheap and expensive landscapes; writes landscape.csv.
    Landscape {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        sampling_rate: Option<f64>,
        #[arg(long)]
        n_points: Option<usize>,
        #[arg(long)]
        n_repeats: Option<usize>,
    },
    /// Theoretical and measured evaluation cost per sampling rate; writes costmodel.csv.
    Costmodel {
        /// Config file; optional when --dataset is given.
        config: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Comma-separated sampling rates.
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        #[arg(long)]
        repetitions: Option<usize>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Parse and check a config file without loading data.
    ValidateConfig {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = ConfigKind::Run)]
        kind: ConfigKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConfigKind {
    Run,
    Benchmark,
    Landscape,
    Costmodel,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(msg) => {
            println!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("emtauc: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> CliResult<String> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    match cli.jobs {
        Some(0) => return Err(CliError::Config("--jobs must be positive".into())),
        Some(n) => pool = pool.num_threads(n),
        None => {}
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> CliResult<String> {
    match command {
        Command::Run {
            config,
            seed,
            output_dir: out,
            solver,
            budget,
            sampling_rate,
            delta,
            no_adjust,
            trace_stride,
        } => {
            let mut cfg: RunConfig = load(&config)?;
            cfg.seed = Some(seed);
            if let Some(k) = solver {
                cfg.solver.kind = k;
            }
            if let Some(b) = budget {
                cfg.env.budget = b;
            }
            if let Some(s) = sampling_rate {
                cfg.env.sampling_rate = s;
            }
            if delta.is_some() {
                cfg.env.delta = delta;
            }
            if no_adjust {
                cfg.env.delta = None;
            }
            if let Some(k) = trace_stride {
                cfg.env.trace_stride = k;
            }
            cfg.validate()?;
            let out = output_dir(out, cfg.output_dir.as_ref())?;
            let m = commands::execute_run(&cfg, &out)?;
            let r = m.result.as_ref().expect("run manifests carry a result");
            Ok(format!(
                "train_auc={} test_auc={} spent={} -> {}",
                r.train_auc,
                r.test_auc.map_or("-".to_string(), |a| a.to_string()),
                r.spent,
                out.display()
            ))
        }
        Command::Benchmark {
            config,
            seed,
            output_dir: out,
            trials,
            folds,
        } => {
            let mut cfg: BenchmarkConfig = load(&config)?;
            cfg.seed = Some(seed);
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(f) = folds {
                cfg.folds = f;
            }
            cfg.validate()?;
            let out = output_dir(out, cfg.output_dir.as_ref())?;
            let s = commands::execute_benchmark(&cfg, &out)?;
            Ok(format!("{} cells, {} rows -> {}", s.cells.len(), s.rows.len(), out.display()))
        }
        Command::Landscape {
            config,
            seed,
            output_dir: out,
            sampling_rate,
            n_points,
            n_repeats,
        } => {
            let mut cfg: LandscapeConfig = load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(s) = sampling_rate {
                cfg.sampling_rate = s;
            }
            if let Some(n) = n_points {
                cfg.n_points = n;
            }
            if let Some(n) = n_repeats {
                cfg.n_repeats = n;
            }
            cfg.validate()?;
            let out = output_dir(out, cfg.output_dir.as_ref())?;
            let r = commands::execute_landscape(&cfg, &out)?;
            Ok(format!("mean rho={} over {} repeats -> {}", r.mean, r.n_repeats, out.display()))
        }
        Command::Costmodel {
            config,
            dataset,
            rates,
            repetitions,
            output_dir: out,
        } => {
            let mut cfg = match (config, dataset) {
                (Some(c), d) => {
                    let mut cfg: CostModelConfig = load(&c)?;
                    if let Some(d) = d {
                        cfg.dataset_path = d;
                    }
                    cfg
                }
                (None, Some(d)) => CostModelConfig::new(d),
                (None, None) => return Err(CliError::Config("costmodel needs a config file or --dataset".into())),
            };
            if let Some(r) = rates {
                cfg.rates = r;
            }
            if let Some(n) = repetitions {
                cfg.repetitions = n;
            }
            cfg.validate()?;
            let out = output_dir(out, cfg.output_dir.as_ref())?;
            let rows = commands::execute_costmodel(&cfg, &out)?;
            Ok(format!("{} rates -> {}", rows.len(), out.display()))
        }
        Command::ValidateConfig { config, kind } => {
            match kind {
                ConfigKind::Run => load::<RunConfig>(&config)?.validate()?,
                ConfigKind::Benchmark => load::<BenchmarkConfig>(&config)?.validate()?,
                ConfigKind::Landscape => load::<LandscapeConfig>(&config)?.validate()?,
                ConfigKind::Costmodel => load::<CostModelConfig>(&config)?.validate()?,
            }
            Ok(format!("{}: ok", config.display()))
        }
    }
}

//! JSON configuration files. Unknown keys are rejected everywhere and
//! relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use emtauc::env::{EnvConfig, SamplingRate};
use emtauc::solvers::{SolverConfig, SolverKind};

use crate::error::{CliError, CliResult};

/// Fallback for `output_dir` when neither the flag nor the file sets it.
pub const OUTPUT_DIR_ENV: &str = "EMTAUC_OUTPUT_DIR";

fn yes() -> bool {
    true
}
fn default_rate() -> f64 {
    0.1
}
fn default_lambda() -> f64 {
    0.125
}
fn default_delta() -> Option<u32> {
    Some(30)
}
fn default_budget() -> f64 {
    101_000.0
}
fn default_stride() -> u32 {
    1
}
fn default_five() -> usize {
    5
}

/// Environment settings. `delta: null` disables dynamic adjustment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSettings {
    #[serde(default = "default_rate")]
    pub sampling_rate: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_delta")]
    pub delta: Option<u32>,
    #[serde(default = "default_budget")]
    pub budget: f64,
    #[serde(default = "default_stride")]
    pub trace_stride: u32,
}

impl Default for EnvSettings {
    fn default() -> Self {
        Self {
            sampling_rate: default_rate(),
            lambda: default_lambda(),
            delta: default_delta(),
            budget: default_budget(),
            trace_stride: default_stride(),
        }
    }
}

impl EnvSettings {
    pub fn to_core(&self) -> CliResult<EnvConfig> {
        SamplingRate::new(self.sampling_rate)?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(CliError::Config(format!("lambda must be finite and nonnegative, got {}", self.lambda)));
        }
        if self.delta == Some(0) {
            return Err(CliError::Config("delta must be positive; use null to disable adjustment".into()));
        }
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return Err(CliError::Config(format!("budget must be positive, got {}", self.budget)));
        }
        if self.trace_stride == 0 {
            return Err(CliError::Config("trace_stride must be positive".into()));
        }
        Ok(EnvConfig {
            rate: self.sampling_rate,
            lambda: self.lambda,
            delta: self.delta,
            budget: self.budget,
            seed: 0,
            trace_stride: self.trace_stride,
        })
    }
}

/// Solver choice and operator settings; omitted values take the solver's defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    /// `single_task_ga`, `mfea` or `emea`.
    pub kind: String,
    #[serde(default)]
    pub pop_size: Option<usize>,
    #[serde(default)]
    pub rmp: Option<f64>,
    #[serde(default)]
    pub transfer_interval: Option<u32>,
    #[serde(default)]
    pub transfer_count: Option<usize>,
    #[serde(default)]
    pub transfer_epsilon: Option<f64>,
    #[serde(default)]
    pub sbx_eta: Option<f64>,
    #[serde(default)]
    pub pm_eta: Option<f64>,
    /// Per-gene mutation probability; `null` means `1/d`.
    #[serde(default)]
    pub pm_prob: Option<f64>,
}

impl SolverSettings {
    pub fn new(kind: SolverKind) -> Self {
        Self {
            kind: kind.name().to_string(),
            pop_size: None,
            rmp: None,
            transfer_interval: None,
            transfer_count: None,
            transfer_epsilon: None,
            sbx_eta: None,
            pm_eta: None,
            pm_prob: None,
        }
    }

    pub fn to_core(&self) -> CliResult<SolverConfig> {
        let kind = SolverKind::from_name(&self.kind).ok_or_else(|| {
            CliError::Config(format!(
                "unknown solver {:?}; expected single_task_ga, mfea or emea",
                self.kind
            ))
        })?;
        let d = SolverConfig::new(kind, 0);
        let c = SolverConfig {
            kind,
            pop_size: self.pop_size.unwrap_or(d.pop_size),
            rmp: self.rmp.unwrap_or(d.rmp),
            transfer_interval: self.transfer_interval.unwrap_or(d.transfer_interval),
            transfer_count: self.transfer_count.unwrap_or(d.transfer_count),
            transfer_epsilon: self.transfer_epsilon.unwrap_or(d.transfer_epsilon),
            sbx_eta: self.sbx_eta.unwrap_or(d.sbx_eta),
            pm_eta: self.pm_eta.unwrap_or(d.pm_eta),
            pm_prob: self.pm_prob,
            seed: 0,
        };
        c.validate()?;
        Ok(c)
    }

    /// The same settings with every default written out, for manifests.
    pub fn resolved(&self) -> CliResult<Self> {
        let c = self.to_core()?;
        Ok(Self {
            kind: self.kind.clone(),
            pop_size: Some(c.pop_size),
            rmp: Some(c.rmp),
            transfer_interval: Some(c.transfer_interval),
            transfer_count: Some(c.transfer_count),
            transfer_epsilon: Some(c.transfer_epsilon),
            sbx_eta: Some(c.sbx_eta),
            pm_eta: Some(c.pm_eta),
            pm_prob: c.pm_prob,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset_path: PathBuf,
    /// Optional held-out set, scaled together with the training file.
    #[serde(default)]
    pub test_path: Option<PathBuf>,
    #[serde(default = "yes")]
    pub scale: bool,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub env: EnvSettings,
    pub solver: SolverSettings,
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.env.to_core()?;
        self.solver.to_core()?;
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) {
        self.dataset_path = join(base, &self.dataset_path);
        self.test_path = self.test_path.as_ref().map(|p| join(base, p));
        self.output_dir = self.output_dir.as_ref().map(|p| join(base, p));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverEntry {
    pub name: String,
    #[serde(default)]
    pub env: EnvSettings,
    pub solver: SolverSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub datasets: Vec<DatasetEntry>,
    pub solvers: Vec<SolverEntry>,
    #[serde(default = "default_five")]
    pub trials: usize,
    #[serde(default = "default_five")]
    pub folds: usize,
    /// Solver name every summary row is compared against.
    #[serde(default)]
    pub baseline: Option<String>,
    #[serde(default = "yes")]
    pub scale: bool,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.datasets.is_empty() || self.solvers.is_empty() {
            return Err(CliError::Config("benchmark needs at least one dataset and one solver".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be positive".into()));
        }
        if self.folds < 2 {
            return Err(CliError::Config("folds must be at least 2".into()));
        }
        let names: Vec<&str> = self
            .datasets
            .iter()
            .map(|d| d.name.as_str())
            .chain(self.solvers.iter().map(|s| s.name.as_str()))
            .collect();
        for n in &names {
            check_name(n)?;
        }
        for (i, d) in self.datasets.iter().enumerate() {
            if self.datasets[..i].iter().any(|o| o.name == d.name) {
                return Err(CliError::Config(format!("duplicate dataset name {:?}", d.name)));
            }
        }
        for (i, s) in self.solvers.iter().enumerate() {
            if self.solvers[..i].iter().any(|o| o.name == s.name) {
                return Err(CliError::Config(format!("duplicate solver name {:?}", s.name)));
            }
            s.env.to_core()?;
            s.solver.to_core()?;
        }
        if let Some(b) = &self.baseline {
            if !self.solvers.iter().any(|s| &s.name == b) {
                return Err(CliError::Config(format!("baseline {b:?} is not one of the solvers")));
            }
        }
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) {
        for d in &mut self.datasets {
            d.path = join(base, &d.path);
        }
        self.output_dir = self.output_dir.as_ref().map(|p| join(base, p));
    }
}

fn default_points() -> usize {
    2000
}
fn default_repeats() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeConfig {
    pub dataset_path: PathBuf,
    #[serde(default = "yes")]
    pub scale: bool,
    #[serde(default = "default_rate")]
    pub sampling_rate: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_points")]
    pub n_points: usize,
    #[serde(default = "default_repeats")]
    pub n_repeats: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl LandscapeConfig {
    pub fn validate(&self) -> CliResult<()> {
        SamplingRate::new(self.sampling_rate)?;
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(CliError::Config(format!("lambda must be finite and nonnegative, got {}", self.lambda)));
        }
        if self.n_repeats == 0 {
            return Err(CliError::Config("n_repeats must be positive".into()));
        }
        if self.n_points < 2 {
            return Err(CliError::Config("n_points must be at least 2".into()));
        }
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) {
        self.dataset_path = join(base, &self.dataset_path);
        self.output_dir = self.output_dir.as_ref().map(|p| join(base, p));
    }
}

fn default_rates() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
}
fn default_repetitions() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModelConfig {
    pub dataset_path: PathBuf,
    #[serde(default = "yes")]
    pub scale: bool,
    #[serde(default = "default_rates")]
    pub rates: Vec<f64>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Timed objective evaluations per rate.
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl CostModelConfig {
    pub fn new(dataset_path: PathBuf) -> Self {
        Self {
            dataset_path,
            scale: true,
            rates: default_rates(),
            lambda: default_lambda(),
            repetitions: default_repetitions(),
            seed: 0,
            output_dir: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.rates.is_empty() {
            return Err(CliError::Config("rates must not be empty".into()));
        }
        for &r in &self.rates {
            SamplingRate::new(r)?;
        }
        if self.repetitions == 0 {
            return Err(CliError::Config("repetitions must be positive".into()));
        }
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) {
        self.dataset_path = join(base, &self.dataset_path);
        self.output_dir = self.output_dir.as_ref().map(|p| join(base, p));
    }
}

/// Configs whose relative paths are anchored at the config file.
pub trait ConfigFile: DeserializeOwned {
    fn anchor(&mut self, base: &Path);
}

impl ConfigFile for RunConfig {
    fn anchor(&mut self, base: &Path) {
        self.resolve_paths(base)
    }
}
impl ConfigFile for BenchmarkConfig {
    fn anchor(&mut self, base: &Path) {
        self.resolve_paths(base)
    }
}
impl ConfigFile for LandscapeConfig {
    fn anchor(&mut self, base: &Path) {
        self.resolve_paths(base)
    }
}
impl ConfigFile for CostModelConfig {
    fn anchor(&mut self, base: &Path) {
        self.resolve_paths(base)
    }
}

pub fn load<T: ConfigFile>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg: T = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cfg.anchor(path.parent().unwrap_or(Path::new("")));
    Ok(cfg)
}

/// Flag, then config file, then `EMTAUC_OUTPUT_DIR`.
pub fn output_dir(flag: Option<PathBuf>, file: Option<&PathBuf>) -> CliResult<PathBuf> {
    flag.or_else(|| file.cloned())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .ok_or_else(|| {
            CliError::Config(format!(
                "no output directory: pass --output-dir, set output_dir, or set {OUTPUT_DIR_ENV}"
            ))
        })
}

fn join(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Names become directory names, so keep them plain.
fn check_name(n: &str) -> CliResult<()> {
    let ok = !n.is_empty()
        && n.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c))
        && !n.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "name {n:?} may only use letters, digits, '_', '-' and '.'"
        )))
    }
}

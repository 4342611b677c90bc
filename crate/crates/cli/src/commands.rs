//! The work behind each subcommand, on already-parsed configs.

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_rational::Ratio;
use serde_json::json;

use emtauc::analysis::{
    landscape_similarity, run_benchmark, seed_configs, train_and_evaluate, BenchmarkDataset, BenchmarkPlan,
    BenchmarkSolver, BenchmarkSummary, LandscapeReport,
};
use emtauc::auc::objective;
use emtauc::data::{parse_libsvm, scale_features, stratified_sample, Dataset};
use emtauc::env::{Cost, SamplingRate};
use emtauc::rng::{self, derive_seed};
use emtauc::solvers::Genome;

use crate::config::{BenchmarkConfig, CostModelConfig, LandscapeConfig, RunConfig, SolverEntry};
use crate::error::{CliError, CliResult};
use crate::manifest::{timestamp, DatasetInfo, RunManifest, RunResult, ARTIFACT_VERSION};

pub const SUMMARY_HEADER: &str = "dataset,solver,mean_auc,std_auc,n,failures,verdict";
pub const LANDSCAPE_HEADER: &str = "repeat,rho,variance";
pub const COSTMODEL_HEADER: &str = "sampling_rate,theoretical_cost,measured_mean_ns,measured_ratio";

pub fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let f = fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_libsvm(BufReader::new(f)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Loads a training file and an optional test file with a shared dimension.
/// With `scale`, both are scaled by the ranges of their union.
pub fn load_pair(
    train: &Path,
    test: Option<&Path>,
    scale: bool,
) -> CliResult<(Arc<Dataset>, Option<Arc<Dataset>>)> {
    let tr = read_dataset(train)?;
    let Some(test) = test else {
        let tr = if scale { scale_features(&tr) } else { tr };
        return Ok((Arc::new(tr), None));
    };
    let te = read_dataset(test)?;
    let dim = tr.dim().max(te.dim());
    let n = tr.len();
    let mut all = tr.instances().to_vec();
    all.extend_from_slice(te.instances());
    let mut joint = Dataset::new(all, dim)?;
    if scale {
        joint = scale_features(&joint);
    }
    let train_idx: Vec<usize> = (0..n).collect();
    let test_idx: Vec<usize> = (n..joint.len()).collect();
    Ok((Arc::new(joint.subset(&train_idx)?), Some(Arc::new(joint.subset(&test_idx)?))))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("manifest types serialize");
    s.push('\n');
    s
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Runs one solver and writes `manifest.json` and `trace.csv` into `out`.
pub fn execute_run(cfg: &RunConfig, out: &Path) -> CliResult<RunManifest> {
    let seed = cfg
        .seed
        .ok_or_else(|| CliError::Config("a seed is required (--seed)".into()))?;
    let env = cfg.env.to_core()?;
    let solver = cfg.solver.to_core()?;
    let (train, test) = load_pair(&cfg.dataset_path, cfg.test_path.as_deref(), cfg.scale)?;
    let (env, solver) = seed_configs(&env, &solver, seed);

    let started_at = timestamp();
    let run = train_and_evaluate(Arc::clone(&train), test.as_ref(), &env, &solver)?;
    let finished_at = timestamp();

    let mut echo = cfg.clone();
    echo.solver = cfg.solver.resolved()?;
    echo.output_dir = Some(out.to_path_buf());
    let manifest = RunManifest {
        artifact_version: ARTIFACT_VERSION.to_string(),
        command: "run".into(),
        seed,
        started_at,
        finished_at,
        config: serde_json::to_value(&echo).expect("config serializes"),
        dataset: DatasetInfo::of(&file_name(&cfg.dataset_path), &train),
        result: Some(RunResult::from(&run)),
        error: None,
    };
    write(&out.join("trace.csv"), &run.trace.to_csv())?;
    write(&out.join("manifest.json"), &to_json(&manifest))?;
    Ok(manifest)
}

/// Directory of one benchmark cell below `out`.
pub fn cell_dir(out: &Path, dataset: &str, solver: &str, trial: usize, fold: usize) -> PathBuf {
    out.join("cells")
        .join(format!("{dataset}__{solver}__t{trial}_f{fold}"))
}

/// Runs the cross-validated sweep and writes `summary.csv` plus one
/// `manifest.json` and `trace.csv` per cell.
pub fn execute_benchmark(cfg: &BenchmarkConfig, out: &Path) -> CliResult<BenchmarkSummary> {
    cfg.validate()?;
    let seed = cfg
        .seed
        .ok_or_else(|| CliError::Config("a seed is required (--seed)".into()))?;
    let datasets = cfg
        .datasets
        .iter()
        .map(|d| {
            let (data, _) = load_pair(&d.path, None, cfg.scale)?;
            Ok(BenchmarkDataset {
                name: d.name.clone(),
                data,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let solvers = cfg
        .solvers
        .iter()
        .map(|s| {
            Ok(BenchmarkSolver {
                name: s.name.clone(),
                env: s.env.to_core()?,
                solver: s.solver.to_core()?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let plan = BenchmarkPlan {
        datasets,
        solvers,
        trials: cfg.trials,
        folds: cfg.folds,
        base_seed: seed,
        baseline: cfg.baseline.clone(),
    };

    let started_at = timestamp();
    let summary = run_benchmark(&plan)?;
    let finished_at = timestamp();

    let mut csv = String::from(SUMMARY_HEADER);
    csv.push('\n');
    for r in &summary.rows {
        let (mean, std) = if r.n == 0 {
            (String::new(), String::new())
        } else {
            (r.mean_auc.to_string(), r.std_auc.to_string())
        };
        let verdict = r.verdict.map_or("", |v| v.symbol());
        writeln!(csv, "{},{},{mean},{std},{},{},{verdict}", r.dataset, r.solver, r.n, r.failures).unwrap();
    }
    write(&out.join("summary.csv"), &csv)?;

    for cell in &summary.cells {
        let k = &cell.key;
        let entry = cfg.solvers.iter().find(|s| s.name == k.solver).expect("cell solver is configured");
        let data = plan.datasets.iter().find(|d| d.name == k.dataset).expect("cell dataset is configured");
        let path = &cfg.datasets.iter().find(|d| d.name == k.dataset).expect("configured").path;
        let echo = json!({
            "dataset": k.dataset,
            "dataset_path": path,
            "scale": cfg.scale,
            "solver": SolverEntry {
                solver: entry.solver.resolved()?,
                ..entry.clone()
            },
            "trials": cfg.trials,
            "folds": cfg.folds,
            "trial": k.trial,
            "fold": k.fold,
            "base_seed": seed,
        });
        let (result, error) = match &cell.outcome {
            Ok(run) => (Some(RunResult::from(run)), None),
            Err(e) => (None, Some(e.clone())),
        };
        let manifest = RunManifest {
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: "benchmark".into(),
            seed: cell.seed,
            started_at: started_at.clone(),
            finished_at: finished_at.clone(),
            config: echo,
            dataset: DatasetInfo::of(&k.dataset, &data.data),
            result,
            error,
        };
        let dir = cell_dir(out, &k.dataset, &k.solver, k.trial, k.fold);
        write(&dir.join("manifest.json"), &to_json(&manifest))?;
        if let Ok(run) = &cell.outcome {
            write(&dir.join("trace.csv"), &run.trace.to_csv())?;
        }
    }
    Ok(summary)
}

/// Rank correlation of the two landscapes; writes `landscape.csv`.
pub fn execute_landscape(cfg: &LandscapeConfig, out: &Path) -> CliResult<LandscapeReport> {
    cfg.validate()?;
    let (ds, _) = load_pair(&cfg.dataset_path, None, cfg.scale)?;
    let report = landscape_similarity(&ds, cfg.sampling_rate, cfg.lambda, cfg.n_points, cfg.n_repeats, cfg.seed)?;
    let mut csv = String::from(LANDSCAPE_HEADER);
    csv.push('\n');
    for (i, rho) in report.rhos.iter().enumerate() {
        writeln!(csv, "{i},{rho},").unwrap();
    }
    writeln!(csv, "mean,{},{}", report.mean, report.variance).unwrap();
    write(&out.join("landscape.csv"), &csv)?;
    Ok(report)
}

/// `(s / 0.1)²`: the pair count at rate `s` relative to rate 0.1, exact.
pub fn theoretical_cost(rate: f64) -> CliResult<Cost> {
    let s = SamplingRate::new(rate)?.exact() * Ratio::from_integer(10);
    Ok(s * s)
}

/// Exact decimal form of a ratio whose denominator has no prime factors
/// other than 2 and 5.
pub fn format_exact(c: Cost) -> String {
    let (n, d) = (*c.numer(), *c.denom());
    let mut s = (n / d).to_string();
    let mut rem = n % d;
    if rem != 0 {
        s.push('.');
        while rem != 0 {
            rem *= 10;
            s.push(char::from(b'0' + (rem / d) as u8));
            rem %= d;
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostRow {
    pub rate: f64,
    pub theoretical: Cost,
    pub measured_ns: f64,
    pub measured_ratio: f64,
}

/// Theoretical and measured cost of one objective evaluation per rate;
/// writes `costmodel.csv`. Timings depend on the machine.
pub fn execute_costmodel(cfg: &CostModelConfig, out: &Path) -> CliResult<Vec<CostRow>> {
    cfg.validate()?;
    let (ds, _) = load_pair(&cfg.dataset_path, None, cfg.scale)?;
    let mut g = rng::seeded(derive_seed(cfg.seed, &[b"weights"]));
    let w = Genome::random(ds.dim(), &mut g).decode();
    let mut rows = Vec::with_capacity(cfg.rates.len());
    for &rate in &cfg.rates {
        let view = stratified_sample(&ds, rate, derive_seed(cfg.seed, &[b"costmodel", &rate.to_bits().to_le_bytes()]))?;
        std::hint::black_box(objective(&w, &view, cfg.lambda)?);
        let t = Instant::now();
        for _ in 0..cfg.repetitions {
            std::hint::black_box(objective(std::hint::black_box(&w), &view, cfg.lambda)?);
        }
        let measured_ns = t.elapsed().as_nanos() as f64 / cfg.repetitions as f64;
        rows.push(CostRow {
            rate,
            theoretical: theoretical_cost(rate)?,
            measured_ns,
            measured_ratio: f64::NAN,
        });
    }
    // Normalize to the 0.1 row, or the first row if 0.1 was not requested.
    let reference = rows
        .iter()
        .find(|r| r.theoretical == Cost::from_integer(1))
        .unwrap_or(&rows[0])
        .measured_ns;
    let mut csv = String::from(COSTMODEL_HEADER);
    csv.push('\n');
    for r in &mut rows {
        r.measured_ratio = r.measured_ns / reference;
        writeln!(
            csv,
            "{},{},{:.1},{:.3}",
            r.rate,
            format_exact(r.theoretical),
            r.measured_ns,
            r.measured_ratio
        )
        .unwrap();
    }
    write(&out.join("costmodel.csv"), &csv)?;
    Ok(rows)
}

use std::sync::Arc;

use rayon::prelude::*;

use super::stats::{compare_cells, mean, sample_variance, Verdict};
use super::trace::ConvergenceTrace;
use crate::auc::{auc_metric, Weights};
use crate::data::{stratified_kfold, Dataset, DatasetView};
use crate::env::{build_environment, AdjustEvent, EnvConfig, TaskId};
use crate::rng::derive_seed;
use crate::solvers::{run_solver, SolverConfig};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct BenchmarkDataset {
    pub name: String,
    pub data: Arc<Dataset>,
}

/// A named solver setup. Seeds in `env` and `solver` are replaced per cell.
#[derive(Clone, Debug)]
pub struct BenchmarkSolver {
    pub name: String,
    pub env: EnvConfig,
    pub solver: SolverConfig,
}

#[derive(Clone, Debug)]
pub struct BenchmarkPlan {
    pub datasets: Vec<BenchmarkDataset>,
    pub solvers: Vec<BenchmarkSolver>,
    pub trials: usize,
    pub folds: usize,
    pub base_seed: u64,
    /// Solver name that every row is compared against.
    pub baseline: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub dataset: String,
    pub solver: String,
    pub trial: usize,
    pub fold: usize,
}

/// Outcome of one optimization run.
#[derive(Clone, Debug, PartialEq)]
pub struct CellRun {
    pub weights: Weights,
    pub best_objective: f64,
    pub train_auc: f64,
    pub test_auc: Option<f64>,
    pub spent: f64,
    pub cheap_evals: u64,
    pub expensive_evals: u64,
    pub adjustments: Vec<AdjustEvent>,
    pub trace: ConvergenceTrace,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub key: CellKey,
    pub seed: u64,
    pub outcome: std::result::Result<CellRun, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub solver: String,
    pub mean_auc: f64,
    pub std_auc: f64,
    pub n: usize,
    pub failures: usize,
    /// Against the baseline solver; `None` without a baseline or with too few runs.
    pub verdict: Option<Verdict>,
    pub aucs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSummary {
    pub cells: Vec<CellResult>,
    pub rows: Vec<SummaryRow>,
}

impl BenchmarkSummary {
    pub fn row(&self, dataset: &str, solver: &str) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.dataset == dataset && r.solver == solver)
    }
}

/// Splits one run seed into the environment seed and the solver seed.
pub fn seed_configs(env: &EnvConfig, solver: &SolverConfig, seed: u64) -> (EnvConfig, SolverConfig) {
    (
        EnvConfig {
            seed,
            ..env.clone()
        },
        SolverConfig {
            seed: derive_seed(seed, &[b"solver"]),
            ..solver.clone()
        },
    )
}

/// Builds an environment on `train`, runs the solver, and scores the archived
/// weights with the unregularized AUC on `train` and, if given, on `test`.
pub fn train_and_evaluate(
    train: Arc<Dataset>,
    test: Option<&Arc<Dataset>>,
    env: &EnvConfig,
    solver: &SolverConfig,
) -> Result<CellRun> {
    let mut environment = build_environment(Arc::clone(&train), env)?;
    let (weights, trace) = run_solver(&mut environment, solver)?;
    let ledger = environment.ledger();
    let train_auc = auc_metric(&weights, &DatasetView::full(Arc::clone(&train)))?;
    let test_auc = test
        .map(|t| auc_metric(&weights, &DatasetView::full(Arc::clone(t))))
        .transpose()?;
    Ok(CellRun {
        weights,
        best_objective: environment.best().map_or(f64::INFINITY, |b| b.objective),
        train_auc,
        test_auc,
        spent: ledger.spent_f64(),
        cheap_evals: ledger.evals(TaskId::Cheap),
        expensive_evals: ledger.evals(TaskId::Expensive),
        adjustments: environment.adjustments().to_vec(),
        trace,
    })
}

/// Repeated stratified k-fold evaluation of every solver on every dataset.
///
/// Fold splits depend only on (dataset, trial), so all solvers see the same
/// splits. Run seeds are `base_seed` mixed with a hash of the cell key.
/// Failed runs are recorded per cell and do not stop the sweep.
pub fn run_benchmark(plan: &BenchmarkPlan) -> Result<BenchmarkSummary> {
    if plan.trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    if plan.folds < 2 {
        return Err(Error::InvalidConfig("folds must be at least 2".into()));
    }
    if let Some(b) = &plan.baseline {
        if !plan.solvers.iter().any(|s| &s.name == b) {
            return Err(Error::InvalidConfig(format!("baseline solver {b:?} is not in the plan")));
        }
    }

    struct Job<'a> {
        key: CellKey,
        data: &'a BenchmarkDataset,
        solver: &'a BenchmarkSolver,
        split_seed: u64,
    }
    let mut jobs = Vec::new();
    for data in &plan.datasets {
        for solver in &plan.solvers {
            for trial in 0..plan.trials {
                let split_seed = derive_seed(
                    plan.base_seed,
                    &[b"split", data.name.as_bytes(), &(trial as u64).to_le_bytes()],
                );
                for fold in 0..plan.folds {
                    jobs.push(Job {
                        key: CellKey {
                            dataset: data.name.clone(),
                            solver: solver.name.clone(),
                            trial,
                            fold,
                        },
                        data,
                        solver,
                        split_seed,
                    });
                }
            }
        }
    }

    let cells: Vec<CellResult> = jobs
        .par_iter()
        .map(|job| {
            let k = &job.key;
            let seed = derive_seed(
                plan.base_seed,
                &[
                    b"run",
                    k.dataset.as_bytes(),
                    k.solver.as_bytes(),
                    &(k.trial as u64).to_le_bytes(),
                    &(k.fold as u64).to_le_bytes(),
                ],
            );
            let outcome = run_cell(job.data, job.solver, job.split_seed, plan.folds, k.fold, seed)
                .map_err(|e| e.to_string());
            CellResult {
                key: k.clone(),
                seed,
                outcome,
            }
        })
        .collect();

    let mut rows = Vec::new();
    for data in &plan.datasets {
        for solver in &plan.solvers {
            let mine: Vec<&CellResult> = cells
                .iter()
                .filter(|c| c.key.dataset == data.name && c.key.solver == solver.name)
                .collect();
            let aucs: Vec<f64> = mine
                .iter()
                .filter_map(|c| c.outcome.as_ref().ok().and_then(|r| r.test_auc))
                .collect();
            rows.push(SummaryRow {
                dataset: data.name.clone(),
                solver: solver.name.clone(),
                mean_auc: mean(&aucs),
                std_auc: sample_variance(&aucs).sqrt(),
                n: aucs.len(),
                failures: mine.len() - aucs.len(),
                verdict: None,
                aucs,
            });
        }
    }
    if let Some(base) = &plan.baseline {
        for i in 0..rows.len() {
            let reference = rows
                .iter()
                .find(|r| r.dataset == rows[i].dataset && &r.solver == base)
                .map(|r| r.aucs.clone())
                .unwrap_or_default();
            rows[i].verdict = compare_cells(&rows[i].aucs, &reference).ok();
        }
    }
    Ok(BenchmarkSummary { cells, rows })
}

fn run_cell(
    data: &BenchmarkDataset,
    solver: &BenchmarkSolver,
    split_seed: u64,
    folds: usize,
    fold: usize,
    seed: u64,
) -> Result<CellRun> {
    let split = stratified_kfold(&data.data, folds, split_seed)?;
    let train = Arc::new(data.data.subset(&split.train_indices(fold))?);
    let test = Arc::new(data.data.subset(&split.test_indices(fold))?);
    let (env, config) = seed_configs(&solver.env, &solver.solver, seed);
    train_and_evaluate(train, Some(&test), &env, &config)
}

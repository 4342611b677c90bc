//! Landscape similarity, convergence traces and cross-validated benchmarks.

mod benchmark;
mod landscape;
mod stats;
mod trace;

pub use benchmark::{
    run_benchmark, seed_configs, train_and_evaluate, BenchmarkDataset, BenchmarkPlan, BenchmarkSolver, BenchmarkSummary, CellKey, CellResult,
    CellRun, SummaryRow,
};
pub use landscape::{landscape_similarity, LandscapeReport};
pub use stats::{
    compare_cells, mean, midranks, rank_sum_test, sample_variance, spearman_rho, RankSumTest, Verdict, ALPHA,
    MIN_RUNS,
};
pub use trace::{ConvergenceTrace, TraceSample, TRACE_HEADER};

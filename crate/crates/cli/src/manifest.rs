use serde::{Deserialize, Serialize};

use emtauc::analysis::CellRun;
use emtauc::data::Dataset;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Published JSON schema for `manifest.json`.
pub const MANIFEST_SCHEMA: &str = include_str!("../schema/manifest.schema.json");

/// Everything needed to reproduce and audit one optimization run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub artifact_version: String,
    /// `run` or `benchmark`.
    pub command: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: String,
    /// Echo of the resolved configuration, defaults written out.
    pub config: serde_json::Value,
    pub dataset: DatasetInfo,
    pub result: Option<RunResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetInfo {
    pub name: String,
    pub instances: usize,
    pub positives: usize,
    pub negatives: usize,
    pub dim: usize,
}

impl DatasetInfo {
    pub fn of(name: &str, ds: &Dataset) -> Self {
        Self {
            name: name.to_string(),
            instances: ds.len(),
            positives: ds.positives().len(),
            negatives: ds.negatives().len(),
            dim: ds.dim(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunResult {
    /// `None` only if the expensive task was never evaluated.
    pub best_objective: Option<f64>,
    pub train_auc: f64,
    pub test_auc: Option<f64>,
    pub spent: f64,
    pub cheap_evaluations: u64,
    pub expensive_evaluations: u64,
    pub weights: Vec<f64>,
    pub adjustments: Vec<AdjustmentRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjustmentRecord {
    pub generation: u32,
    /// Fingerprint of the cheap task's sample after the adjustment.
    pub fingerprint: String,
}

impl From<&CellRun> for RunResult {
    fn from(r: &CellRun) -> Self {
        Self {
            best_objective: r.best_objective.is_finite().then_some(r.best_objective),
            train_auc: r.train_auc,
            test_auc: r.test_auc,
            spent: r.spent,
            cheap_evaluations: r.cheap_evals,
            expensive_evaluations: r.expensive_evals,
            weights: r.weights.0.clone(),
            adjustments: r
                .adjustments
                .iter()
                .map(|a| AdjustmentRecord {
                    generation: a.generation,
                    fingerprint: a.fingerprint.clone(),
                })
                .collect(),
        }
    }
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

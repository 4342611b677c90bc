//! Real-coded evolutionary solvers over the unified search space `[0, 1]^d`.
//!
//! A genome key `k` decodes to the weight `2k - 1`, so every solver searches
//! the box `[-1, 1]^d`.

mod emea;
mod ga;
mod mfea;
pub mod operators;
mod transfer;

pub use emea::run_emea;
pub use ga::run_single_task_ga;
pub use mfea::run_mfea;
pub use transfer::{fit_transfer_map, TransferMap};

use rand::Rng as _;

use crate::analysis::ConvergenceTrace;
use crate::auc::Weights;
use crate::env::{Environment, TaskId};
use crate::rng::Rng;
use crate::{Error, Result};

/// Random keys in `[0, 1]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Genome(pub Vec<f64>);

impl Genome {
    pub fn random(dim: usize, rng: &mut Rng) -> Self {
        Self((0..dim).map(|_| rng.gen::<f64>()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn decode(&self) -> Weights {
        Weights(self.0.iter().map(|k| 2.0 * k - 1.0).collect())
    }

    pub fn clamped(mut self) -> Self {
        for k in &mut self.0 {
            *k = k.clamp(0.0, 1.0);
        }
        self
    }
}

/// Rank given to tasks an individual was never evaluated on.
pub const UNRANKED: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    /// Objective per task; `None` when not evaluated on that task.
    pub factorial_cost: [Option<f64>; 2],
    /// 1-based rank per task, [`UNRANKED`] when not evaluated.
    pub factorial_rank: [usize; 2],
    pub skill_factor: TaskId,
    pub scalar_fitness: f64,
}

impl Individual {
    pub fn new(genome: Genome, skill_factor: TaskId) -> Self {
        Self {
            genome,
            factorial_cost: [None, None],
            factorial_rank: [UNRANKED, UNRANKED],
            skill_factor,
            scalar_fitness: 0.0,
        }
    }

    pub fn evaluated(genome: Genome, task: TaskId, objective: f64) -> Self {
        let mut ind = Self::new(genome, task);
        ind.factorial_cost[task.index()] = Some(objective);
        ind
    }

    /// Cost on `task`, `+∞` when unevaluated.
    pub fn cost(&self, task: TaskId) -> f64 {
        self.factorial_cost[task.index()].unwrap_or(f64::INFINITY)
    }
}

/// Recomputes factorial ranks, skill factors and scalar fitness.
///
/// Ranks are taken among individuals evaluated on each task (ties keep
/// population order). Skill factor is the best-ranked task, the cheap task
/// on ties; individuals evaluated nowhere keep their skill factor and get
/// zero fitness.
pub fn assign_ranks(pop: &mut [Individual]) {
    for task in TaskId::ALL {
        let t = task.index();
        let mut order: Vec<usize> = (0..pop.len())
            .filter(|&i| pop[i].factorial_cost[t].is_some())
            .collect();
        order.sort_by(|&a, &b| pop[a].cost(task).total_cmp(&pop[b].cost(task)));
        for ind in pop.iter_mut() {
            ind.factorial_rank[t] = UNRANKED;
        }
        for (r, &i) in order.iter().enumerate() {
            pop[i].factorial_rank[t] = r + 1;
        }
    }
    for ind in pop.iter_mut() {
        let [c, e] = ind.factorial_rank;
        if c == UNRANKED && e == UNRANKED {
            ind.scalar_fitness = 0.0;
            continue;
        }
        ind.skill_factor = if e < c { TaskId::Expensive } else { TaskId::Cheap };
        ind.scalar_fitness = 1.0 / ind.factorial_rank[ind.skill_factor.index()] as f64;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverKind {
    SingleTaskGa,
    Mfea,
    Emea,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::SingleTaskGa => "single_task_ga",
            SolverKind::Mfea => "mfea",
            SolverKind::Emea => "emea",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "single_task_ga" => Some(SolverKind::SingleTaskGa),
            "mfea" => Some(SolverKind::Mfea),
            "emea" => Some(SolverKind::Emea),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    /// Population size; for EMEA, per task.
    pub pop_size: usize,
    /// Random mating probability for cross-skill pairs (MFEA).
    pub rmp: f64,
    /// Generations between explicit transfers (EMEA).
    pub transfer_interval: u32,
    /// Individuals transferred each way per transfer (EMEA).
    pub transfer_count: usize,
    /// Ridge term of the transfer map fit (EMEA).
    pub transfer_epsilon: f64,
    pub sbx_eta: f64,
    pub pm_eta: f64,
    /// Per-gene mutation probability; `None` means `1/d`.
    pub pm_prob: Option<f64>,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(kind: SolverKind, seed: u64) -> Self {
        Self {
            kind,
            pop_size: match kind {
                SolverKind::Mfea => 20,
                _ => 10,
            },
            rmp: 0.3,
            transfer_interval: 5,
            transfer_count: 2,
            transfer_epsilon: 1e-6,
            sbx_eta: 15.0,
            pm_eta: 15.0,
            pm_prob: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.pop_size < 2 {
            return bad(format!("pop_size must be at least 2, got {}", self.pop_size));
        }
        if !(0.0..=1.0).contains(&self.rmp) {
            return bad(format!("rmp must lie in [0, 1], got {}", self.rmp));
        }
        if let Some(p) = self.pm_prob {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("pm_prob must lie in [0, 1], got {p}"));
            }
        }
        if !(self.sbx_eta >= 0.0 && self.pm_eta >= 0.0) {
            return bad("distribution indices must be nonnegative".into());
        }
        if self.transfer_interval == 0 {
            return bad("transfer_interval must be positive".into());
        }
        if self.transfer_count > self.pop_size {
            return bad(format!(
                "transfer_count {} exceeds pop_size {}",
                self.transfer_count, self.pop_size
            ));
        }
        if !(self.transfer_epsilon >= 0.0) {
            return bad("transfer_epsilon must be nonnegative".into());
        }
        Ok(())
    }

    pub(crate) fn mutation_prob(&self, dim: usize) -> f64 {
        self.pm_prob.unwrap_or(1.0 / dim.max(1) as f64)
    }
}

/// Runs the configured solver to budget exhaustion.
pub fn run_solver(env: &mut Environment, config: &SolverConfig) -> Result<(Weights, ConvergenceTrace)> {
    match config.kind {
        SolverKind::SingleTaskGa => run_single_task_ga(env, config),
        SolverKind::Mfea => run_mfea(env, config),
        SolverKind::Emea => run_emea(env, config),
    }
}

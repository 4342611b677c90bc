//! The two-task environment: a cheap task on a stratified sample and the
//! expensive task on the full training set, sharing one cost budget.
//!
//! One cheap evaluation costs one unit; one expensive evaluation costs `1/s²`
//! units. Costs are kept as exact rationals so the ledger never drifts.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::analysis::{ConvergenceTrace, TraceSample};
use crate::auc::{evaluate, hardness_scores, select_hardest, Evaluation, Weights};
use crate::data::{stratified_sample, Dataset, DatasetView};
use crate::solvers::Individual;
use crate::{Error, Result};

pub type Cost = Ratio<u128>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskId {
    Cheap = 0,
    Expensive = 1,
}

impl TaskId {
    pub const ALL: [TaskId; 2] = [TaskId::Cheap, TaskId::Expensive];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn other(self) -> TaskId {
        match self {
            TaskId::Cheap => TaskId::Expensive,
            TaskId::Expensive => TaskId::Cheap,
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskId::Cheap => "cheap",
            TaskId::Expensive => "expensive",
        })
    }
}

const MAX_DECIMALS: u32 = 6;

/// Exact rational for a decimal value with at most six fractional digits,
/// read from its shortest round-trip representation.
pub fn decimal_ratio(v: f64) -> Option<Cost> {
    if !v.is_finite() || v < 0.0 {
        return None;
    }
    let text = format!("{v}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    if frac.len() as u32 > MAX_DECIMALS {
        return None;
    }
    let den = 10u128.pow(frac.len() as u32);
    let num: u128 = format!("{int}{frac}").parse().ok()?;
    Some(Ratio::new(num, den))
}

/// Sampling rate with its exact decimal value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingRate {
    value: f64,
    exact: Cost,
}

impl SamplingRate {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value <= 1.0) {
            return Err(Error::RateOutOfRange(value));
        }
        let exact = decimal_ratio(value).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "sampling rate {value} must have at most {MAX_DECIMALS} decimal places"
            ))
        })?;
        Ok(Self { value, exact })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Cost {
        self.exact
    }

    /// `1/s²`, the cost of one expensive evaluation in cheap units.
    pub fn expensive_cost(&self) -> Cost {
        let inv = self.exact.recip();
        inv * inv
    }
}

pub fn cost_to_f64(c: Cost) -> f64 {
    *c.numer() as f64 / *c.denom() as f64
}

/// An AUC objective bound to a view of the data.
#[derive(Clone, Debug)]
pub struct TaskSpec {
    pub id: TaskId,
    pub view: DatasetView,
    pub lambda: f64,
    pub cost_per_eval: Cost,
}

impl TaskSpec {
    pub fn evaluate(&self, w: &Weights) -> Result<Evaluation> {
        evaluate(w, &self.view, self.lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Charge {
    Remaining(Cost),
    Exhausted,
}

/// Budget accounting in cheap-evaluation units.
#[derive(Clone, Debug, PartialEq)]
pub struct CostLedger {
    budget: Cost,
    costs: [Cost; 2],
    evals: [u64; 2],
}

impl CostLedger {
    pub fn new(budget: f64, rate: SamplingRate) -> Result<Self> {
        let budget = decimal_ratio(budget)
            .filter(|b| *b > Cost::from_integer(0))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "budget {budget} must be positive with at most {MAX_DECIMALS} decimal places"
                ))
            })?;
        Ok(Self {
            budget,
            costs: [Cost::from_integer(1), rate.expensive_cost()],
            evals: [0, 0],
        })
    }

    pub fn budget(&self) -> Cost {
        self.budget
    }

    pub fn cost_per_eval(&self, task: TaskId) -> Cost {
        self.costs[task.index()]
    }

    pub fn evals(&self, task: TaskId) -> u64 {
        self.evals[task.index()]
    }

    /// `Σ evals(t)·cost(t)`, exact.
    pub fn spent(&self) -> Cost {
        TaskId::ALL
            .iter()
            .map(|&t| self.costs[t.index()] * Cost::from_integer(self.evals[t.index()] as u128))
            .sum()
    }

    pub fn spent_f64(&self) -> f64 {
        cost_to_f64(self.spent())
    }

    pub fn is_exhausted(&self) -> bool {
        self.spent() >= self.budget
    }

    /// Records one evaluation of `task`. The evaluation that reaches the budget
    /// is accepted and reported as [`Charge::Exhausted`]; any later charge fails.
    pub fn charge(&mut self, task: TaskId) -> Result<Charge> {
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted);
        }
        self.evals[task.index()] += 1;
        let spent = self.spent();
        Ok(if spent >= self.budget {
            Charge::Exhausted
        } else {
            Charge::Remaining(self.budget - spent)
        })
    }

    /// How many leading requests of `tasks` the budget admits, counting the
    /// one that crosses the limit.
    pub fn affordable(&self, tasks: impl IntoIterator<Item = TaskId>) -> usize {
        let mut spent = self.spent();
        let mut n = 0;
        for t in tasks {
            if spent >= self.budget {
                break;
            }
            spent += self.costs[t.index()];
            n += 1;
        }
        n
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvConfig {
    pub rate: f64,
    pub lambda: f64,
    /// Adjustment interval δ in generations; `None` disables adjustment.
    pub delta: Option<u32>,
    pub budget: f64,
    pub seed: u64,
    /// Record every k-th generation in the convergence trace.
    pub trace_stride: u32,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            rate: 0.1,
            lambda: 0.125,
            delta: Some(30),
            budget: 101_000.0,
            seed: 0,
            trace_stride: 1,
        }
    }
}

/// Best-ever expensive-task solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Archive {
    pub weights: Weights,
    pub objective: f64,
    pub auc: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjustEvent {
    pub generation: u32,
    pub fingerprint: String,
}

pub struct Environment {
    dataset: Arc<Dataset>,
    rate: SamplingRate,
    delta: Option<u32>,
    tasks: [TaskSpec; 2],
    ledger: CostLedger,
    best: Option<Archive>,
    adjustments: Vec<AdjustEvent>,
    trace: ConvergenceTrace,
}

/// Builds the cheap task on a fresh stratified sample and the expensive task
/// on the whole dataset.
pub fn build_environment(ds: Arc<Dataset>, config: &EnvConfig) -> Result<Environment> {
    let rate = SamplingRate::new(config.rate)?;
    if !(config.lambda >= 0.0 && config.lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be a finite nonnegative number, got {}",
            config.lambda
        )));
    }
    if config.delta == Some(0) {
        return Err(Error::InvalidConfig("delta must be positive".into()));
    }
    if config.trace_stride == 0 {
        return Err(Error::InvalidConfig("trace_stride must be positive".into()));
    }
    let ledger = CostLedger::new(config.budget, rate)?;
    let cheap_view = stratified_sample(&ds, config.rate, config.seed)?;
    let tasks = [
        TaskSpec {
            id: TaskId::Cheap,
            view: cheap_view,
            lambda: config.lambda,
            cost_per_eval: ledger.cost_per_eval(TaskId::Cheap),
        },
        TaskSpec {
            id: TaskId::Expensive,
            view: DatasetView::full(Arc::clone(&ds)),
            lambda: config.lambda,
            cost_per_eval: ledger.cost_per_eval(TaskId::Expensive),
        },
    ];
    Ok(Environment {
        dataset: ds,
        rate,
        delta: config.delta,
        tasks,
        ledger,
        best: None,
        adjustments: Vec::new(),
        trace: ConvergenceTrace::new(config.trace_stride),
    })
}

impl Environment {
    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    pub fn dim(&self) -> usize {
        self.dataset.dim()
    }

    pub fn rate(&self) -> SamplingRate {
        self.rate
    }

    pub fn delta(&self) -> Option<u32> {
        self.delta
    }

    pub fn task(&self, id: TaskId) -> &TaskSpec {
        &self.tasks[id.index()]
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn is_exhausted(&self) -> bool {
        self.ledger.is_exhausted()
    }

    pub fn best(&self) -> Option<&Archive> {
        self.best.as_ref()
    }

    pub fn adjustments(&self) -> &[AdjustEvent] {
        &self.adjustments
    }

    pub fn trace(&self) -> &ConvergenceTrace {
        &self.trace
    }

    /// Evaluates each request on its task and charges the ledger in request
    /// order. Only the prefix the budget admits is evaluated, so the result
    /// may be shorter than `requests`.
    pub fn evaluate_batch(&mut self, requests: &[(TaskId, Weights)]) -> Result<Vec<Evaluation>> {
        let n = self.ledger.affordable(requests.iter().map(|r| r.0));
        let tasks = &self.tasks;
        let evals: Vec<Evaluation> = requests[..n]
            .par_iter()
            .map(|(t, w)| tasks[t.index()].evaluate(w))
            .collect::<Result<_>>()?;
        for ((task, w), e) in requests[..n].iter().zip(&evals) {
            self.ledger.charge(*task)?;
            if *task == TaskId::Expensive {
                self.offer(w, e);
            }
        }
        Ok(evals)
    }

    fn offer(&mut self, w: &Weights, e: &Evaluation) {
        let improves = self.best.as_ref().map_or(true, |b| e.objective < b.objective);
        if improves {
            self.best = Some(Archive {
                weights: w.clone(),
                objective: e.objective,
                auc: e.auc(),
            });
        }
    }

    /// Whether joint generation `t` triggers an adjustment (`t mod δ == 0`).
    pub fn should_adjust(&self, t: u32) -> bool {
        self.delta.is_some_and(|d| t % d == 0)
    }

    /// Replaces the cheap task's sample with the instances hardest for `w_e`.
    pub fn adjust_cheap_task(&mut self, w_e: &Weights, generation: u32) -> Result<()> {
        let scores = hardness_scores(w_e, &self.dataset)?;
        let view = select_hardest(&scores, &self.dataset, self.rate.value())?;
        self.adjustments.push(AdjustEvent {
            generation,
            fingerprint: view.fingerprint(),
        });
        self.tasks[TaskId::Cheap.index()].view = view;
        Ok(())
    }

    /// Adjusts the cheap task using the archived best expensive solution.
    /// Returns `false` when nothing has been archived yet.
    pub fn adjust_from_archive(&mut self, generation: u32) -> Result<bool> {
        let Some(w) = self.best.as_ref().map(|b| b.weights.clone()) else {
            return Ok(false);
        };
        self.adjust_cheap_task(&w, generation)?;
        Ok(true)
    }

    /// Refreshes the cheap-task cost of every cheap-skilled individual on the
    /// current cheap view, one cost unit each. Stops early if the budget runs
    /// out; the refreshes that were charged are kept.
    pub fn reevaluate_population(&mut self, population: &mut [Individual]) -> Result<()> {
        let members: Vec<usize> = (0..population.len())
            .filter(|&i| population[i].skill_factor == TaskId::Cheap)
            .collect();
        let requests: Vec<(TaskId, Weights)> = members
            .iter()
            .map(|&i| (TaskId::Cheap, population[i].genome.decode()))
            .collect();
        let evals = self.evaluate_batch(&requests)?;
        for (&i, e) in members.iter().zip(&evals) {
            population[i].factorial_cost[TaskId::Cheap.index()] = Some(e.objective);
        }
        Ok(())
    }

    /// Appends a trace sample for generation `t` (subject to the stride).
    pub fn record(&mut self, generation: u32, best_cheap: Option<f64>, adjusted: bool) {
        let Some(best) = &self.best else { return };
        let sample = TraceSample {
            generation,
            cumulative_cost: self.ledger.spent_f64(),
            best_objective: best.objective,
            best_auc: best.auc,
            best_objective_cheap: best_cheap,
            adjust_event: adjusted,
        };
        self.trace.offer(sample, self.ledger.is_exhausted());
    }

    /// Archived best weights and the trace so far. Zero weights if nothing
    /// was ever evaluated on the expensive task.
    pub fn result(&self) -> (Weights, ConvergenceTrace) {
        let w = self
            .best
            .as_ref()
            .map(|b| b.weights.clone())
            .unwrap_or_else(|| Weights::zeros(self.dataset.dim()));
        (w, self.trace.clone())
    }
}

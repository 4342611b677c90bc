use super::operators::{pm_mutation, sbx_crossover, tournament};
use super::{Genome, Individual, SolverConfig};
use crate::analysis::ConvergenceTrace;
use crate::auc::Weights;
use crate::env::{Environment, TaskId};
use crate::rng::{self, Rng};
use crate::Result;

/// Evaluates genomes on `task`, returning the individuals the budget admitted.
pub(super) fn evaluate_on(
    env: &mut Environment,
    task: TaskId,
    genomes: Vec<Genome>,
) -> Result<Vec<Individual>> {
    let tagged: Vec<(TaskId, Genome)> = genomes.into_iter().map(|g| (task, g)).collect();
    evaluate_tagged(env, tagged)
}

/// Evaluates each genome on its own task, in order.
pub(super) fn evaluate_tagged(
    env: &mut Environment,
    genomes: Vec<(TaskId, Genome)>,
) -> Result<Vec<Individual>> {
    let requests: Vec<(TaskId, Weights)> =
        genomes.iter().map(|(t, g)| (*t, g.decode())).collect();
    let evals = env.evaluate_batch(&requests)?;
    Ok(genomes
        .into_iter()
        .zip(evals)
        .map(|((t, g), e)| Individual::evaluated(g, t, e.objective))
        .collect())
}

/// `n` children by binary tournament on `task` cost, SBX and PM.
pub(super) fn breed(
    pop: &[Individual],
    task: TaskId,
    n: usize,
    config: &SolverConfig,
    dim: usize,
    rng: &mut Rng,
) -> Vec<Genome> {
    let costs: Vec<f64> = pop.iter().map(|p| p.cost(task)).collect();
    let pm_prob = config.mutation_prob(dim);
    let mut children = Vec::with_capacity(n + 1);
    while children.len() < n {
        let a = tournament(&costs, rng);
        let b = tournament(&costs, rng);
        let (c1, c2) = sbx_crossover(&pop[a].genome, &pop[b].genome, config.sbx_eta, rng);
        children.push(pm_mutation(&c1, config.pm_eta, pm_prob, rng));
        children.push(pm_mutation(&c2, config.pm_eta, pm_prob, rng));
    }
    children.truncate(n);
    children
}

/// Sorts by `task` cost (stable) and keeps the best `size`.
pub(super) fn truncate(pop: &mut Vec<Individual>, task: TaskId, size: usize) {
    pop.sort_by(|a, b| a.cost(task).total_cmp(&b.cost(task)));
    pop.truncate(size);
}

pub(super) fn best_cost(pop: &[Individual], task: TaskId) -> Option<f64> {
    pop.iter()
        .filter_map(|p| p.factorial_cost[task.index()])
        .min_by(f64::total_cmp)
}

/// Generational (μ+λ) GA on the expensive task alone.
///
/// Binary tournament parents, SBX and PM offspring, truncation survival over
/// parents and offspring. Runs until the ledger is exhausted and returns the
/// archived best weights.
pub fn run_single_task_ga(env: &mut Environment,
    config: &SolverConfig,
) -> Result<(Weights, ConvergenceTrace)> {
    config.validate()?;
    let task = TaskId::Expensive;
    let dim = env.dim();
    let mut rng = rng::seeded(config.seed);

    let init: Vec<Genome> = (0..config.pop_size)
        .map(|_| Genome::random(dim, &mut rng))
        .collect();
    let mut pop = evaluate_on(env, task, init)?;
    truncate(&mut pop, task, config.pop_size);
    env.record(0, None, false);

    let mut t = 1;
    while !env.is_exhausted() {
        let children = breed(&pop, task, config.pop_size, config, dim, &mut rng);
        pop.extend(evaluate_on(env, task, children)?);
        truncate(&mut pop, task, config.pop_size);
        env.record(t, None, false);
        t += 1;
    }
    Ok(env.result())
}

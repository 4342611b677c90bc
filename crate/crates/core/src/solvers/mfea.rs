use rand::seq::SliceRandom;
use rand::Rng as _;

use super::ga::{best_cost, evaluate_tagged};
use super::operators::{pm_mutation, sbx_crossover};
use super::{assign_ranks, Genome, Individual, SolverConfig};
use crate::analysis::ConvergenceTrace;
use crate::auc::Weights;
use crate::env::{Environment, TaskId};
use crate::rng::{self, Rng};
use crate::Result;

/// Multifactorial GA over one population shared by both tasks.
///
/// Parents are paired at random. Pairs with the same skill factor always
/// cross over; mixed pairs cross over with probability `rmp` and otherwise
/// each parent is mutated on its own. Crossover children imitate the skill
/// factor of a randomly chosen parent, and every child is evaluated only on
/// its skill-factor task. Survival keeps the best `pop_size` by scalar
/// fitness. Every `δ` generations the cheap task's sample is rebuilt from
/// the archived best expensive solution and cheap-skilled members are
/// re-evaluated.
pub fn run_mfea(env: &mut Environment, config: &SolverConfig) -> Result<(Weights, ConvergenceTrace)> {
    config.validate()?;
    let dim = env.dim();
    let mut rng = rng::seeded(config.seed);

    // Skill factors alternate, expensive first, and each member is evaluated
    // on that task only.
    let init: Vec<(TaskId, Genome)> = (0..config.pop_size)
        .map(|i| {
            let task = if i % 2 == 0 { TaskId::Expensive } else { TaskId::Cheap };
            (task, Genome::random(dim, &mut rng))
        })
        .collect();
    let mut pop = evaluate_tagged(env, init)?;
    assign_ranks(&mut pop);
    env.record(0, best_cost(&pop, TaskId::Cheap), false);

    let mut t = 1;
    while !env.is_exhausted() {
        let mut adjusted = false;
        if env.should_adjust(t) && env.adjust_from_archive(t)? {
            env.reevaluate_population(&mut pop)?;
            assign_ranks(&mut pop);
            adjusted = true;
            if env.is_exhausted() {
                env.record(t, best_cost(&pop, TaskId::Cheap), adjusted);
                break;
            }
        }

        let children = offspring(&pop, config, dim, &mut rng);
        pop.extend(evaluate_tagged(env, children)?);
        assign_ranks(&mut pop);
        select(&mut pop, config.pop_size);
        env.record(t, best_cost(&pop, TaskId::Cheap), adjusted);
        t += 1;
    }
    Ok(env.result())
}

/// Assortative mating with skill-factor imitation.
fn offspring(
    pop: &[Individual],
    config: &SolverConfig,
    dim: usize,
    rng: &mut Rng,
) -> Vec<(TaskId, Genome)> {
    let pm_prob = config.mutation_prob(dim);
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.shuffle(rng);
    let mut children = Vec::with_capacity(config.pop_size + 1);
    let mut k = 0;
    while children.len() < config.pop_size {
        let a = &pop[order[k % order.len()]];
        let b = &pop[order[(k + 1) % order.len()]];
        k += 2;
        let same = a.skill_factor == b.skill_factor;
        if same || rng.gen_bool(config.rmp) {
            let (c1, c2) = sbx_crossover(&a.genome, &b.genome, config.sbx_eta, rng);
            for c in [c1, c2] {
                let skill = if same || rng.gen_bool(0.5) {
                    a.skill_factor
                } else {
                    b.skill_factor
                };
                children.push((skill, pm_mutation(&c, config.pm_eta, pm_prob, rng)));
            }
        } else {
            for p in [a, b] {
                children.push((p.skill_factor, pm_mutation(&p.genome, config.pm_eta, pm_prob, rng)));
            }
        }
    }
    children.truncate(config.pop_size);
    children
}

/// Keeps the `size` fittest by scalar fitness; stable, so parents win ties.
fn select(pop: &mut Vec<Individual>, size: usize) {
    pop.sort_by(|a, b| b.scalar_fitness.total_cmp(&a.scalar_fitness));
    pop.truncate(size);
    assign_ranks(pop);
}

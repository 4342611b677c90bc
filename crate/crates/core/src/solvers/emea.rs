use super::ga::{best_cost, breed, evaluate_tagged, truncate};
use super::transfer::{fit_transfer_map, genome_matrix};
use super::{Genome, Individual, SolverConfig};
use crate::analysis::ConvergenceTrace;
use crate::auc::Weights;
use crate::env::{Environment, TaskId};
use crate::rng;
use crate::Result;

/// Two populations, one per task, each evolved by the (μ+λ) GA.
///
/// Every `transfer_interval` generations a linear map is fitted in each
/// direction between the objective-sorted populations, the top
/// `transfer_count` members of each population are mapped into the other
/// task's space, evaluated there, and replace the target's worst members.
pub fn run_emea(env: &mut Environment, config: &SolverConfig) -> Result<(Weights, ConvergenceTrace)> {
    config.validate()?;
    let dim = env.dim();
    let size = config.pop_size;
    let mut rng = rng::seeded(config.seed);

    let mut init = Vec::with_capacity(2 * size);
    for task in [TaskId::Expensive, TaskId::Cheap] {
        for _ in 0..size {
            init.push((task, Genome::random(dim, &mut rng)));
        }
    }
    let mut pops: [Vec<Individual>; 2] = [Vec::new(), Vec::new()];
    distribute(&mut pops, evaluate_tagged(env, init)?, size);
    env.record(0, best_cost(&pops[0], TaskId::Cheap), false);

    let mut t: u32 = 1;
    while !env.is_exhausted() {
        let mut adjusted = false;
        if env.should_adjust(t) && env.adjust_from_archive(t)? {
            env.reevaluate_population(&mut pops[TaskId::Cheap.index()])?;
            truncate(&mut pops[TaskId::Cheap.index()], TaskId::Cheap, size);
            adjusted = true;
            if env.is_exhausted() {
                env.record(t, best_cost(&pops[0], TaskId::Cheap), adjusted);
                break;
            }
        }

        let mut children = Vec::with_capacity(2 * size);
        for task in [TaskId::Cheap, TaskId::Expensive] {
            let pop = &pops[task.index()];
            children.extend(breed(pop, task, size, config, dim, &mut rng).into_iter().map(|g| (task, g)));
        }
        distribute(&mut pops, evaluate_tagged(env, children)?, size);

        if config.transfer_count > 0 && t % config.transfer_interval == 0 && !env.is_exhausted() {
            transfer(env, &mut pops, config)?;
        }
        env.record(t, best_cost(&pops[0], TaskId::Cheap), adjusted);
        t += 1;
    }
    Ok(env.result())
}

/// Adds evaluated individuals to their task's population and truncates both.
fn distribute(pops: &mut [Vec<Individual>; 2], evaluated: Vec<Individual>, size: usize) {
    for ind in evaluated {
        pops[ind.skill_factor.index()].push(ind);
    }
    for task in TaskId::ALL {
        truncate(&mut pops[task.index()], task, size);
    }
}

fn transfer(env: &mut Environment, pops: &mut [Vec<Individual>; 2], config: &SolverConfig) -> Result<()> {
    let m = pops[0].len().min(pops[1].len());
    let s = config.transfer_count.min(m);
    if m == 0 || s == 0 {
        return Ok(());
    }
    // Populations are kept sorted by their own objective.
    let mats: Vec<_> = pops
        .iter()
        .map(|p| genome_matrix(&p[..m].iter().map(|i| &i.genome).collect::<Vec<_>>()))
        .collect();

    let mut migrants = Vec::with_capacity(2 * s);
    for source in TaskId::ALL {
        let target = source.other();
        let map = fit_transfer_map(&mats[source.index()], &mats[target.index()], config.transfer_epsilon)?;
        for ind in &pops[source.index()][..s] {
            migrants.push((target, map.apply(&ind.genome)));
        }
    }
    let evaluated = evaluate_tagged(env, migrants)?;
    for target in TaskId::ALL {
        let pop = &mut pops[target.index()];
        let incoming: Vec<Individual> = evaluated
            .iter()
            .filter(|i| i.skill_factor == target)
            .cloned()
            .collect();
        let keep = pop.len() - incoming.len().min(pop.len());
        pop.truncate(keep);
        pop.extend(incoming);
        pop.sort_by(|a, b| a.cost(target).total_cmp(&b.cost(target)));
    }
    Ok(())
}

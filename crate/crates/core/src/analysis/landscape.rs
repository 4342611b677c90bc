use std::sync::Arc;

use rayon::prelude::*;

use super::stats::{mean, sample_variance, spearman_rho};
use crate::auc::objective;
use crate::data::{stratified_sample, Dataset, DatasetView};
use crate::rng::{self, derive_seed};
use crate::solvers::Genome;
use crate::{Error, Result};

/// Rank correlation between cheap and expensive objective landscapes.
#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeReport {
    pub rhos: Vec<f64>,
    pub n_points: usize,
    pub n_repeats: usize,
    pub rate: f64,
    pub mean: f64,
    pub variance: f64,
}

/// For each repeat, draws a fresh stratified sample at `rate` and `n_points`
/// uniform genomes, evaluates both objectives and records Spearman's rho.
/// Nothing here is charged to an optimizer budget.
pub fn landscape_similarity(
    ds: &Arc<Dataset>,
    rate: f64,
    lambda: f64,
    n_points: usize,
    n_repeats: usize,
    seed: u64,
) -> Result<LandscapeReport> {
    if n_repeats == 0 {
        return Err(Error::InvalidConfig("n_repeats must be positive".into()));
    }
    if n_points < 2 {
        return Err(Error::InvalidConfig("n_points must be at least 2".into()));
    }
    let full = DatasetView::full(Arc::clone(ds));
    let rhos = (0..n_repeats)
        .map(|r| {
            let rep = (r as u64).to_le_bytes();
            let cheap = stratified_sample(ds, rate, derive_seed(seed, &[b"sample", &rep]))?;
            let mut g = rng::seeded(derive_seed(seed, &[b"points", &rep]));
            let points: Vec<Genome> = (0..n_points).map(|_| Genome::random(ds.dim(), &mut g)).collect();
            let (c, e): (Vec<f64>, Vec<f64>) = points
                .par_iter()
                .map(|p| {
                    let w = p.decode();
                    Ok((objective(&w, &cheap, lambda)?, objective(&w, &full, lambda)?))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            spearman_rho(&c, &e)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(LandscapeReport {
        mean: mean(&rhos),
        variance: sample_variance(&rhos),
        rhos,
        n_points,
        n_repeats,
        rate,
    })
}

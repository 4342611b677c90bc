//! AUC of a linear scorer and the regularized pairwise objective.
//!
//! A pair (positive, negative) counts as a loss when the positive's score is
//! less than *or equal to* the negative's. Ties are full losses, so a zero
//! weight vector has AUC 0 and loss fraction 1.

use std::sync::Arc;

use crate::data::{class_sample_size, check_rate, Dataset, DatasetView};
use crate::{Error, Result};

/// Dense weights of a linear scorer `f(x) = w·x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights(pub Vec<f64>);

impl Weights {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|w| w * w).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|w| w * c).collect())
    }
}

impl From<Vec<f64>> for Weights {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

fn check_dim(w: &Weights, dim: usize) -> Result<()> {
    if w.len() == dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: dim,
            actual: w.len(),
        })
    }
}

/// Scores of `indices` under `w`. `-0.0` is folded into `0.0` so that exact
/// comparisons and total-order sorting agree.
fn scores(w: &[f64], ds: &Dataset, indices: &[usize]) -> Vec<f64> {
    indices
        .iter()
        .map(|&i| ds.instance(i).dot(w) + 0.0)
        .collect()
}

/// Decision values of the view's positives and negatives, in view order.
pub fn decision_values(w: &Weights, view: &DatasetView) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim(w, view.dim())?;
    let ds = view.base();
    Ok((
        scores(w.as_slice(), ds, view.positives()),
        scores(w.as_slice(), ds, view.negatives()),
    ))
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().map(|x| x + 0.0).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Number of pairs with `f_pos[i] <= f_neg[j]`, by sorting and a merge sweep.
pub fn pairwise_loss_count(f_pos: &[f64], f_neg: &[f64]) -> Result<u64> {
    if f_pos.is_empty() {
        return Err(Error::EmptyClass("positive"));
    }
    if f_neg.is_empty() {
        return Err(Error::EmptyClass("negative"));
    }
    let pos = sorted(f_pos);
    let neg = sorted(f_neg);
    let mut j = 0usize;
    let mut count = 0u64;
    for &p in &pos {
        while j < neg.len() && neg[j] < p {
            j += 1;
        }
        count += (neg.len() - j) as u64;
    }
    Ok(count)
}

/// Loss count, pair count and the derived quantities for one weight vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub loss_count: u64,
    pub pairs: u64,
    pub objective: f64,
}

impl Evaluation {
    pub fn loss_fraction(&self) -> f64 {
        self.loss_count as f64 / self.pairs as f64
    }

    pub fn auc(&self) -> f64 {
        1.0 - self.loss_fraction()
    }
}

/// Evaluates `w` on `view`: loss fraction plus `(lambda / 2)·‖w‖²`.
pub fn evaluate(w: &Weights, view: &DatasetView, lambda: f64) -> Result<Evaluation> {
    let (fp, fn_) = decision_values(w, view)?;
    let loss_count = pairwise_loss_count(&fp, &fn_)?;
    let pairs = (fp.len() * fn_.len()) as u64;
    let objective = loss_count as f64 / pairs as f64 + 0.5 * lambda * w.norm_sq();
    Ok(Evaluation {
        loss_count,
        pairs,
        objective,
    })
}

pub fn loss_fraction(w: &Weights, view: &DatasetView) -> Result<f64> {
    Ok(evaluate(w, view, 0.0)?.loss_fraction())
}

/// `1 - loss_count / (T⁺·T⁻)`.
pub fn auc_metric(w: &Weights, view: &DatasetView) -> Result<f64> {
    Ok(evaluate(w, view, 0.0)?.auc())
}

/// The minimization target: loss fraction plus `(lambda / 2)·‖w‖²`.
pub fn objective(w: &Weights, view: &DatasetView, lambda: f64) -> Result<f64> {
    Ok(evaluate(w, view, lambda)?.objective)
}

/// Per-instance hardness under a reference classifier.
///
/// `pos_scores[i]` belongs to `ds.positives()[i]` and counts negatives scoring
/// at least as high. `neg_scores[j]` belongs to `ds.negatives()[j]` and counts
/// positives scoring strictly lower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardnessScores {
    pub pos_scores: Vec<u64>,
    pub neg_scores: Vec<u64>,
}

pub fn hardness_scores(w_e: &Weights, ds: &Dataset) -> Result<HardnessScores> {
    check_dim(w_e, ds.dim())?;
    let fp = scores(w_e.as_slice(), ds, ds.positives());
    let fn_ = scores(w_e.as_slice(), ds, ds.negatives());
    let sp = sorted(&fp);
    let sn = sorted(&fn_);
    let pos_scores = fp
        .iter()
        .map(|&p| (sn.len() - sn.partition_point(|&n| n < p)) as u64)
        .collect();
    let neg_scores = fn_
        .iter()
        .map(|&n| sp.partition_point(|&p| p < n) as u64)
        .collect();
    Ok(HardnessScores {
        pos_scores,
        neg_scores,
    })
}

/// Keeps the highest-scoring instances of each class; equal scores go to the
/// lower dataset index. Counts follow [`class_sample_size`].
pub fn select_hardest(scores: &HardnessScores, ds: &Arc<Dataset>, rate: f64) -> Result<DatasetView> {
    check_rate(rate)?;
    let pick = |class: &[usize], s: &[u64]| -> Vec<usize> {
        let mut order: Vec<usize> = (0..class.len()).collect();
        // Stable sort over ascending positions preserves index order within ties.
        order.sort_by(|&a, &b| s[b].cmp(&s[a]));
        order.truncate(class_sample_size(rate, class.len()));
        order.into_iter().map(|k| class[k]).collect()
    };
    let mut selected = pick(ds.positives(), &scores.pos_scores);
    selected.extend(pick(ds.negatives(), &scores.neg_scores));
    selected.sort_unstable();
    DatasetView::from_indices(Arc::clone(ds), selected)
}

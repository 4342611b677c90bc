//! Binary classification datasets in LIBSVM sparse text format.
//!
//! Datasets are immutable once built. Subsamples are expressed as
//! [`DatasetView`]s that borrow the base dataset through an [`Arc`], so the
//! cheap and expensive tasks can share one copy of the data.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;
use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::rng::{self, Fnv64};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// Any label strictly greater than zero is positive.
    pub fn from_value(v: f64) -> Self {
        if v > 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => "+1",
            Label::Negative => "-1",
        }
    }
}

/// One sparse instance. Feature indices are 1-based and strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub features: Vec<(u32, f64)>,
    pub label: Label,
}

impl Instance {
    /// Sparse dot product; `w[j - 1]` pairs with feature index `j`.
    #[inline]
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.features
            .iter()
            .map(|&(j, v)| w[j as usize - 1] * v)
            .sum()
    }

    pub fn max_index(&self) -> u32 {
        self.features.last().map_or(0, |&(j, _)| j)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    instances: Vec<Instance>,
    dim: usize,
    pos_idx: Vec<usize>,
    neg_idx: Vec<usize>,
}

impl Dataset {
    /// Builds a dataset, checking index ordering and that both classes occur.
    ///
    /// `dim` is raised to the largest feature index if it is smaller.
    pub fn new(instances: Vec<Instance>, dim: usize) -> Result<Self> {
        let mut max_index = 0usize;
        for (n, inst) in instances.iter().enumerate() {
            check_increasing(&inst.features, n + 1)?;
            max_index = max_index.max(inst.max_index() as usize);
        }
        let (pos_idx, neg_idx): (Vec<usize>, Vec<usize>) =
            (0..instances.len()).partition(|&i| instances[i].label == Label::Positive);
        if pos_idx.is_empty() || neg_idx.is_empty() {
            return Err(Error::MissingClass {
                positives: pos_idx.len(),
                negatives: neg_idx.len(),
            });
        }
        Ok(Self {
            instances,
            dim: dim.max(max_index),
            pos_idx,
            neg_idx,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn instance(&self, i: usize) -> &Instance {
        &self.instances[i]
    }

    /// Indices of positive instances, ascending.
    pub fn positives(&self) -> &[usize] {
        &self.pos_idx
    }

    /// Indices of negative instances, ascending.
    pub fn negatives(&self) -> &[usize] {
        &self.neg_idx
    }

    /// A new dataset holding the given instances in the given order. Keeps `dim`.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let instances = indices.iter().map(|&i| self.instances[i].clone()).collect();
        Dataset::new(instances, self.dim)
    }

    /// Canonical LIBSVM text: `+1`/`-1` labels, ascending indices,
    /// shortest round-trip decimal values, one instance per line.
    pub fn to_libsvm(&self) -> String {
        let mut out = String::new();
        for inst in &self.instances {
            out.push_str(inst.label.as_str());
            for &(j, v) in &inst.features {
                let _ = write!(out, " {j}:{v}");
            }
            out.push('\n');
        }
        out
    }
}

fn check_increasing(features: &[(u32, f64)], line: usize) -> Result<()> {
    for pair in features.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(Error::NonIncreasingIndex {
                line,
                index: pair[1].0,
                previous: pair[0].0,
            });
        }
    }
    Ok(())
}

/// Parses LIBSVM text. `#` starts a comment; blank lines are skipped.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut instances = Vec::new();
    let mut dim = 0usize;
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let label_value: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid label {label_tok:?}"),
        })?;
        let mut features = Vec::new();
        let mut previous = 0u32;
        for tok in tokens {
            let (idx, val) = parse_pair(tok).ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected <index>:<value>, found {tok:?}"),
            })?;
            if idx <= previous {
                return Err(Error::NonIncreasingIndex {
                    line: line_no,
                    index: idx,
                    previous,
                });
            }
            previous = idx;
            features.push((idx, val));
        }
        dim = dim.max(previous as usize);
        instances.push(Instance {
            features,
            label: Label::from_value(label_value),
        });
    }
    Dataset::new(instances, dim)
}

fn parse_pair(tok: &str) -> Option<(u32, f64)> {
    let (i, v) = tok.split_once(':')?;
    let idx: u32 = i.parse().ok().filter(|&i| i >= 1)?;
    let val: f64 = v.parse().ok().filter(|v: &f64| v.is_finite())?;
    Some((idx, val))
}

pub fn parse_libsvm_str(text: &str) -> Result<Dataset> {
    parse_libsvm(text.as_bytes())
}

/// Maps every feature affinely onto [-1, 1] over the whole dataset.
///
/// Absent entries count as zeros in the column range, so the output may be
/// denser than the input. Constant columns map to 0 and are dropped.
pub fn scale_features(ds: &Dataset) -> Dataset {
    let d = ds.dim;
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    let mut present = vec![0usize; d];
    for inst in &ds.instances {
        for &(j, v) in &inst.features {
            let j = j as usize - 1;
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
            present[j] += 1;
        }
    }
    for j in 0..d {
        if present[j] < ds.len() {
            lo[j] = lo[j].min(0.0);
            hi[j] = hi[j].max(0.0);
        }
    }

    let map = |j: usize, x: f64| -> f64 {
        if lo[j] == hi[j] {
            0.0
        } else if lo[j] == -1.0 && hi[j] == 1.0 {
            x
        } else {
            (-1.0 + 2.0 * (x - lo[j]) / (hi[j] - lo[j])).clamp(-1.0, 1.0)
        }
    };

    let instances = ds
        .instances
        .iter()
        .map(|inst| {
            let mut dense = vec![0.0; d];
            for &(j, v) in &inst.features {
                dense[j as usize - 1] = v;
            }
            let features = dense
                .iter()
                .enumerate()
                .filter_map(|(j, &x)| {
                    let y = map(j, x);
                    (y != 0.0).then_some((j as u32 + 1, y))
                })
                .collect();
            Instance {
                features,
                label: inst.label,
            }
        })
        .collect();

    Dataset {
        instances,
        dim: ds.dim,
        pos_idx: ds.pos_idx.clone(),
        neg_idx: ds.neg_idx.clone(),
    }
}

/// A subset of a base dataset, split by class.
#[derive(Clone, Debug)]
pub struct DatasetView {
    base: Arc<Dataset>,
    selected: Vec<usize>,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

impl PartialEq for DatasetView {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.base, &other.base) || self.base == other.base)
            && self.selected == other.selected
    }
}

impl DatasetView {
    pub fn full(base: Arc<Dataset>) -> Self {
        let selected = (0..base.len()).collect();
        let pos = base.pos_idx.clone();
        let neg = base.neg_idx.clone();
        Self {
            base,
            selected,
            pos,
            neg,
        }
    }

    /// A view over `indices` in the given order. Indices must be valid and unique,
    /// and both classes must be present.
    pub fn from_indices(base: Arc<Dataset>, indices: Vec<usize>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(indices.len());
        for &i in &indices {
            if i >= base.len() || !seen.insert(i) {
                return Err(Error::InvalidConfig(format!(
                    "view index {i} is out of range or repeated"
                )));
            }
        }
        let (pos, neg): (Vec<usize>, Vec<usize>) = indices
            .iter()
            .partition(|&&i| base.instances[i].label == Label::Positive);
        if pos.is_empty() || neg.is_empty() {
            return Err(Error::MissingClass {
                positives: pos.len(),
                negatives: neg.len(),
            });
        }
        Ok(Self {
            base,
            selected: indices,
            pos,
            neg,
        })
    }

    pub fn base(&self) -> &Arc<Dataset> {
        &self.base
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn positives(&self) -> &[usize] {
        &self.pos
    }

    pub fn negatives(&self) -> &[usize] {
        &self.neg
    }

    pub fn n_pos(&self) -> usize {
        self.pos.len()
    }

    pub fn n_neg(&self) -> usize {
        self.neg.len()
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.base.dim
    }

    /// FNV-1a over the selected indices, as 16 hex digits.
    pub fn fingerprint(&self) -> String {
        let mut h = Fnv64::default();
        for &i in &self.selected {
            h.write_u64(i as u64);
        }
        format!("{:016x}", h.finish())
    }
}

/// Number of instances drawn from a class of `class_size` at `rate`:
/// `floor(rate * class_size)`, at least one.
pub fn class_sample_size(rate: f64, class_size: usize) -> usize {
    // The epsilon absorbs representation error, e.g. 0.29 * 100 = 28.999999999999996.
    let k = (rate * class_size as f64 + 1e-9).floor() as usize;
    k.clamp(1, class_size.max(1))
}

pub(crate) fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate <= 1.0 {
        Ok(())
    } else {
        Err(Error::RateOutOfRange(rate))
    }
}

/// Draws a class-stratified sample without replacement. Each class
/// contributes [`class_sample_size`] instances; the view lists them in
/// ascending index order.
pub fn stratified_sample(ds: &Arc<Dataset>, rate: f64, seed: u64) -> Result<DatasetView> {
    check_rate(rate)?;
    if rate == 1.0 {
        return Ok(DatasetView::full(Arc::clone(ds)));
    }
    let mut rng = rng::seeded(seed);
    let mut pick = |class: &[usize]| -> Vec<usize> {
        let k = class_sample_size(rate, class.len());
        let mut chosen: Vec<usize> = rand::seq::index::sample(&mut rng, class.len(), k)
            .into_iter()
            .map(|i| class[i])
            .collect();
        chosen.sort_unstable();
        chosen
    };
    let pos = pick(&ds.pos_idx);
    let neg = pick(&ds.neg_idx);
    let mut selected: Vec<usize> = pos.iter().chain(&neg).copied().collect();
    selected.sort_unstable();
    Ok(DatasetView {
        base: Arc::clone(ds),
        selected,
        pos,
        neg,
    })
}

/// Fold assignment for stratified k-fold cross-validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvSplit {
    fold_assignments: Vec<usize>,
    k: usize,
}

impl CvSplit {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_assignments(&self) -> &[usize] {
        &self.fold_assignments
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_assignments.len())
            .filter(|&i| self.fold_assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_assignments.len())
            .filter(|&i| self.fold_assignments[i] != fold)
            .collect()
    }
}

/// Shuffles each class with a seeded RNG and deals it round-robin over `k` folds.
///
/// Negatives start dealing where positives stopped, which keeps total fold
/// sizes within one of each other as well.
pub fn stratified_kfold(ds: &Dataset, k: usize, seed: u64) -> Result<CvSplit> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("fold count must be at least 2, got {k}")));
    }
    for class in [&ds.pos_idx, &ds.neg_idx] {
        if class.len() < k {
            return Err(Error::ClassTooSmall {
                size: class.len(),
                folds: k,
            });
        }
    }
    let mut rng = rng::seeded(seed);
    let mut fold_assignments = vec![0; ds.len()];
    let mut offset = 0;
    for class in [&ds.pos_idx, &ds.neg_idx] {
        let mut order = class.clone();
        order.shuffle(&mut rng);
        for (pos, &i) in order.iter().enumerate() {
            fold_assignments[i] = (pos + offset) % k;
        }
        offset = (offset + order.len()) % k;
    }
    Ok(CvSplit { fold_assignments, k })
}

#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;

use emtauc::data::{Dataset, Instance, Label};
use emtauc::rng;

/// Dense instances from rows of `(features, positive)`.
pub fn dense(rows: &[(Vec<f64>, bool)]) -> Arc<Dataset> {
    let dim = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let instances = rows
        .iter()
        .map(|(x, pos)| Instance {
            features: x
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, v)| (j as u32 + 1, *v))
                .collect(),
            label: if *pos { Label::Positive } else { Label::Negative },
        })
        .collect();
    Arc::new(Dataset::new(instances, dim).unwrap())
}

/// Linearly separable: the label is the sign of the first feature, which is
/// kept at least 0.1 away from zero.
pub fn separable(n_pos: usize, n_neg: usize, dim: usize, seed: u64) -> Arc<Dataset> {
    let mut r = rng::seeded(seed);
    let rows: Vec<(Vec<f64>, bool)> = (0..n_pos + n_neg)
        .map(|i| {
            let pos = i < n_pos;
            let mut x: Vec<f64> = (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect();
            let m: f64 = r.gen_range(0.1..1.0);
            x[0] = if pos { m } else { -m };
            (x, pos)
        })
        .collect();
    dense(&rows)
}

/// Two overlapping Gaussian-ish clouds; no weight vector reaches AUC 1.
pub fn overlapping(n_pos: usize, n_neg: usize, dim: usize, shift: f64, seed: u64) -> Arc<Dataset> {
    let mut r = rng::seeded(seed);
    let rows: Vec<(Vec<f64>, bool)> = (0..n_pos + n_neg)
        .map(|i| {
            let pos = i < n_pos;
            let x = (0..dim)
                .map(|j| {
                    // Sum of uniforms, roughly normal with unit variance.
                    let z: f64 = (0..12).map(|_| r.gen::<f64>()).sum::<f64>() - 6.0;
                    let mu = if pos && j < 2 { shift } else { 0.0 };
                    ((z + mu) / 4.0).clamp(-1.0, 1.0)
                })
                .collect();
            (x, pos)
        })
        .collect();
    dense(&rows)
}

use nalgebra::DMatrix;

use super::Genome;
use crate::{Error, Result};

/// Linear map between the two tasks' search spaces, `y = M·x` (no bias).
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMap {
    pub matrix: DMatrix<f64>,
}

impl TransferMap {
    /// Maps a genome and clamps the result back into `[0, 1]^d`.
    pub fn apply(&self, g: &Genome) -> Genome {
        let x = nalgebra::DVector::from_column_slice(&g.0);
        Genome((&self.matrix * x).iter().copied().collect()).clamped()
    }
}

/// Ridge least squares `M = Q·Pᵀ·(P·Pᵀ + εI)⁻¹`, minimizing `‖M·P − Q‖_F`.
///
/// `source` and `target` are `d × m` matrices whose columns are paired
/// individuals (each population sorted by its own objective).
pub fn fit_transfer_map(source: &DMatrix<f64>, target: &DMatrix<f64>, epsilon: f64) -> Result<TransferMap> {
    if source.ncols() < 1 || target.ncols() < 1 {
        return Err(Error::InsufficientSamples {
            required: 1,
            actual: source.ncols().min(target.ncols()),
        });
    }
    if source.shape() != target.shape() {
        return Err(Error::LengthMismatch(source.len(), target.len()));
    }
    let d = source.nrows();
    let gram = source * source.transpose() + DMatrix::<f64>::identity(d, d) * epsilon;
    let cross = target * source.transpose();
    // M·G = C with G symmetric, so solve G·Mᵀ = Cᵀ.
    let mt = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&cross.transpose()),
        None => gram
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::InvalidConfig(format!("transfer map fit failed: {e}")))?
            * cross.transpose(),
    };
    Ok(TransferMap {
        matrix: mt.transpose(),
    })
}

/// Columns are the given genomes.
pub(super) fn genome_matrix(genomes: &[&Genome]) -> DMatrix<f64> {
    let d = genomes.first().map_or(0, |g| g.len());
    DMatrix::from_fn(d, genomes.len(), |i, j| genomes[j].0[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng as _;

    fn random_matrix(r: &mut rng::Rng, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| r.gen::<f64>())
    }

    #[test]
    fn identity_when_target_equals_source() {
        let mut r = rng::seeded(1);
        let p = random_matrix(&mut r, 5, 40);
        let m = fit_transfer_map(&p, &p, 1e-10).unwrap();
        let err = (&m.matrix - DMatrix::<f64>::identity(5, 5)).norm();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn scalar_map() {
        let mut r = rng::seeded(2);
        let p = random_matrix(&mut r, 4, 30);
        let m = fit_transfer_map(&p, &(&p * 2.0), 1e-10).unwrap();
        let err = (&m.matrix - DMatrix::<f64>::identity(4, 4) * 2.0).norm();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn beats_random_competitors() {
        let mut r = rng::seeded(3);
        for _ in 0..10 {
            let p = random_matrix(&mut r, 6, 10);
            let q = random_matrix(&mut r, 6, 10);
            let m = fit_transfer_map(&p, &q, 1e-6).unwrap();
            let best = (&m.matrix * &p - &q).norm();
            for _ in 0..100 {
                let c = DMatrix::from_fn(6, 6, |_, _| r.gen_range(-1.0..1.0));
                assert!(best <= (&c * &p - &q).norm());
            }
        }
    }

    #[test]
    fn rank_deficient_source_is_handled() {
        // d = 8 but only 3 samples.
        let mut r = rng::seeded(4);
        let p = random_matrix(&mut r, 8, 3);
        let q = random_matrix(&mut r, 8, 3);
        let m = fit_transfer_map(&p, &q, 1e-6).unwrap();
        assert!(m.matrix.iter().all(|v| v.is_finite()));
        let g = m.apply(&Genome(vec![0.9; 8]));
        assert!(g.0.iter().all(|k| (0.0..=1.0).contains(k)));
    }

    #[test]
    fn empty_input_is_rejected() {
        let p = DMatrix::<f64>::zeros(3, 0);
        assert!(fit_transfer_map(&p, &p, 1e-6).is_err());
    }
}

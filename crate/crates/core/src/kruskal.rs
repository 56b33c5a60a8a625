//! Kruskal (CP) form: a weighted sum of rank-one outer products.

use crate::algebra::khatri_rao;
use crate::error::{invalid, mismatch, Result, TensorError};
use crate::matrix::Matrix;
use crate::random;
use crate::tensor::DenseTensor;

/// `Σ_r w_r · u^(1)_r ∘ … ∘ u^(N)_r`, with factor `k` of shape `I_k × R`.
#[derive(Clone, Debug, PartialEq)]
pub struct KruskalTensor {
    weights: Vec<f64>,
    factors: Vec<Matrix>,
}

impl KruskalTensor {
    pub fn new(weights: Vec<f64>, factors: Vec<Matrix>) -> Result<Self> {
        if factors.is_empty() {
            return Err(invalid!("kruskal tensor needs at least one factor"));
        }
        let rank = weights.len();
        if rank == 0 {
            return Err(invalid!("kruskal rank must be at least 1"));
        }
        for (k, f) in factors.iter().enumerate() {
            if f.cols() != rank {
                return Err(mismatch!("factor {k} has {} columns, rank is {rank}", f.cols()));
            }
        }
        Ok(Self { weights, factors })
    }

    /// Unit weights.
    pub fn from_factors(factors: Vec<Matrix>) -> Result<Self> {
        let rank = factors.first().map_or(0, Matrix::cols);
        Self::new(vec![1.0; rank], factors)
    }

    /// Seeded Gaussian factors with unit weights.
    pub fn random(shape: &[usize], rank: usize, seed: u64) -> Result<Self> {
        if rank == 0 {
            return Err(invalid!("kruskal rank must be at least 1"));
        }
        if shape.is_empty() || shape.contains(&0) {
            return Err(invalid!("invalid shape {shape:?}"));
        }
        let mut rng = random::seeded(seed);
        let factors = shape.iter().map(|&dim| random::gaussian_matrix(&mut rng, dim, rank)).collect();
        Self::from_factors(factors)
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(Matrix::rows).collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<Matrix>) {
        (self.weights, self.factors)
    }

    /// Dense reconstruction through the mode-0 unfolding:
    /// `U_0 · diag(w) · (U_1 ⊙ … ⊙ U_{N-1})ᵀ` is the row-major buffer.
    pub fn to_tensor(&self) -> Result<DenseTensor> {
        let mut head = self.factors[0].clone();
        head.scale_columns(&self.weights);
        let shape = self.shape();
        if self.order() == 1 {
            let data = (0..head.rows()).map(|i| head.row(i).iter().sum()).collect();
            return DenseTensor::new(shape, data);
        }
        let tail: Vec<&Matrix> = self.factors[1..].iter().collect();
        let kr = khatri_rao(&tail)?;
        let unfolded = head.matmul_t(&kr)?;
        DenseTensor::new(shape, unfolded.into_vec())
    }

    /// Rescales every factor column to unit 2-norm, moving the norms into the weights.
    pub fn normalize(&self) -> Result<KruskalTensor> {
        let mut weights = self.weights.clone();
        let mut factors = self.factors.clone();
        for (k, f) in factors.iter_mut().enumerate() {
            let norms = f.column_norms();
            if let Some(r) = norms.iter().position(|&n| n == 0.0) {
                return Err(TensorError::DegenerateFactor(format!(
                    "column {r} of factor {k} is identically zero"
                )));
            }
            f.scale_columns(&norms.iter().map(|n| 1.0 / n).collect::<Vec<_>>());
            weights.iter_mut().zip(&norms).for_each(|(w, n)| *w *= n);
        }
        Ok(KruskalTensor { weights, factors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::outer;
    use crate::decomposition::partial_svd;

    /// Direct Σ_r w_r · outer(columns) summation.
    fn outer_sum(kt: &KruskalTensor) -> DenseTensor {
        let mut acc = DenseTensor::zeros(&kt.shape()).unwrap();
        for r in 0..kt.rank() {
            let cols: Vec<Vec<f64>> = kt.factors().iter().map(|f| f.column(r)).collect();
            let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
            let term = outer(&refs).unwrap().scaled(kt.weights()[r]);
            acc = acc.add(&term).unwrap();
        }
        acc
    }

    fn numerical_rank(m: &Matrix) -> usize {
        let k = m.rows().min(m.cols());
        let svd = partial_svd(m, k).unwrap();
        svd.s.iter().filter(|&&s| s > 1e-10 * svd.s[0]).count()
    }

    #[test]
    fn basis_and_scaled_examples() {
        let e0 = Matrix::column_vector(&[1.0, 0.0]);
        let kt = KruskalTensor::from_factors(vec![e0.clone(), e0.clone(), e0]).unwrap();
        let t = kt.to_tensor().unwrap();
        assert_eq!(t.get(&[0, 0, 0]), 1.0);
        assert_eq!(t.frobenius_norm(), 1.0);

        let kt = KruskalTensor::new(
            vec![2.0],
            vec![Matrix::column_vector(&[1.0, 1.0]), Matrix::column_vector(&[1.0, 2.0])],
        )
        .unwrap();
        assert_eq!(kt.to_tensor().unwrap().as_slice(), &[2.0, 4.0, 2.0, 4.0]);
    }

    #[test]
    fn reconstruction_matches_outer_sum() {
        for seed in 0..5 {
            let kt = KruskalTensor::random(&[3, 4, 2, 3], 3, seed).unwrap();
            let fast = kt.to_tensor().unwrap();
            let slow = outer_sum(&kt);
            assert!(fast.max_abs_diff(&slow).unwrap() < 1e-12 * slow.frobenius_norm());
        }
        let kt = KruskalTensor::random(&[5], 2, 1).unwrap();
        assert!(kt.to_tensor().unwrap().max_abs_diff(&outer_sum(&kt)).unwrap() < 1e-14);
    }

    #[test]
    fn rejects_rank_mismatch() {
        let err = KruskalTensor::new(vec![1.0, 1.0], vec![Matrix::zeros(2, 2), Matrix::zeros(3, 1)]);
        assert!(err.is_err());
        assert!(KruskalTensor::random(&[2, 2], 0, 0).is_err());
    }

    #[test]
    fn normalize_examples() {
        let kt = KruskalTensor::random(&[4, 3, 5], 3, 2).unwrap().normalize().unwrap();
        let again = kt.normalize().unwrap();
        for (a, b) in kt.weights().iter().zip(again.weights()) {
            assert!((a - b).abs() < 1e-15 * a.abs().max(1.0));
        }

        let mut factors = kt.factors().to_vec();
        factors[1].scale_columns(&[3.0, 1.0, 1.0]);
        let scaled = KruskalTensor::new(kt.weights().to_vec(), factors).unwrap();
        let renorm = scaled.normalize().unwrap();
        assert!((renorm.weights()[0] - 3.0 * kt.weights()[0]).abs() < 1e-12 * kt.weights()[0]);
        let before = scaled.to_tensor().unwrap();
        let after = renorm.to_tensor().unwrap();
        assert!(before.max_abs_diff(&after).unwrap() < 1e-12 * before.frobenius_norm());

        let degenerate =
            KruskalTensor::from_factors(vec![Matrix::zeros(2, 1), Matrix::filled(2, 1, 1.0)]).unwrap();
        assert!(matches!(degenerate.normalize(), Err(TensorError::DegenerateFactor(_))));
    }

    #[test]
    fn random_is_seeded_and_has_planted_rank() {
        assert_eq!(KruskalTensor::random(&[4, 4, 4], 2, 9).unwrap(), KruskalTensor::random(&[4, 4, 4], 2, 9).unwrap());
        let x = KruskalTensor::random(&[4, 4, 4], 2, 9).unwrap().to_tensor().unwrap();
        for mode in 0..3 {
            assert_eq!(numerical_rank(&x.unfold(mode).unwrap()), 2);
        }
    }
}

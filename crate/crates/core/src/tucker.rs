//! Tucker form: a core tensor multiplied by a factor matrix along every mode.

use crate::algebra::multi_mode_dot_factors;
use crate::error::{invalid, mismatch, Result};
use crate::matrix::Matrix;
use crate::random;
use crate::tensor::DenseTensor;

/// `G ×_1 U_1 ×_2 … ×_N U_N`, with factor `k` of shape `I_k × R_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TuckerTensor {
    core: DenseTensor,
    factors: Vec<Matrix>,
}

impl TuckerTensor {
    pub fn new(core: DenseTensor, factors: Vec<Matrix>) -> Result<Self> {
        if factors.len() != core.order() {
            return Err(mismatch!("{} factors for an order-{} core", factors.len(), core.order()));
        }
        for (k, (f, &r)) in factors.iter().zip(core.shape()).enumerate() {
            if f.cols() != r {
                return Err(mismatch!("factor {k} has {} columns, core dimension is {r}", f.cols()));
            }
        }
        Ok(Self { core, factors })
    }

    /// Seeded Gaussian core and factors.
    pub fn random(shape: &[usize], ranks: &[usize], seed: u64) -> Result<Self> {
        if shape.len() != ranks.len() {
            return Err(mismatch!("shape {shape:?} and ranks {ranks:?} differ in length"));
        }
        if shape.is_empty() || shape.contains(&0) || ranks.contains(&0) {
            return Err(invalid!("invalid shape {shape:?} or ranks {ranks:?}"));
        }
        let mut rng = random::seeded(seed);
        let core_len = ranks.iter().product();
        let core = DenseTensor::new(ranks.to_vec(), random::gaussian_vec(&mut rng, core_len))?;
        let factors = shape
            .iter()
            .zip(ranks)
            .map(|(&dim, &r)| random::gaussian_matrix(&mut rng, dim, r))
            .collect();
        Self::new(core, factors)
    }

    pub fn core(&self) -> &DenseTensor {
        &self.core
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn ranks(&self) -> &[usize] {
        self.core.shape()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(Matrix::rows).collect()
    }

    pub fn into_parts(self) -> (DenseTensor, Vec<Matrix>) {
        (self.core, self.factors)
    }

    pub fn to_tensor(&self) -> Result<DenseTensor> {
        multi_mode_dot_factors(&self.core, &self.factors, None, false)
    }
}

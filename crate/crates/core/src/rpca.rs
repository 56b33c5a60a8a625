//! Proximal operators and robust tensor PCA.
//!
//! [`robust_tpca`] splits an observed tensor `X` into a low multilinear-rank
//! part `L` and a sparse part `S` by solving
//!
//! ```text
//! min  Σ_n ‖J_n,(n)‖_* + λ‖S‖_1   s.t.  J_n = L (all n),  L + S = X
//! ```
//!
//! with ADMM at a fixed penalty `μ`. Each iteration updates the consensus
//! `L` by averaging, then every `J_n` (singular-value thresholding of the
//! mode-`n` unfolding) and `S` (soft thresholding) independently, then the
//! dual variables. Iteration stops once the combined residual (see
//! [`RpcaResult::residual_trace`]) drops to `tol`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposition::svd::svd_above;
use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::tensor::DenseTensor;

/// Types whose entries can be mapped one at a time.
pub trait Entrywise: Sized {
    fn map_entries(&self, f: impl Fn(f64) -> f64) -> Self;
}

impl Entrywise for DenseTensor {
    fn map_entries(&self, f: impl Fn(f64) -> f64) -> Self {
        self.map(f)
    }
}

impl Entrywise for Matrix {
    fn map_entries(&self, f: impl Fn(f64) -> f64) -> Self {
        self.map(f)
    }
}

/// `sign(v) · max(|v| − tau, 0)`.
pub fn shrink(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// Proximal operator of `tau · ‖·‖_1`, applied entrywise.
pub fn soft_threshold<T: Entrywise>(x: &T, tau: f64) -> Result<T> {
    if !(tau >= 0.0) {
        return Err(invalid!("threshold must be non-negative, got {tau}"));
    }
    Ok(x.map_entries(|v| shrink(v, tau)))
}

/// Proximal operator of `tau · ‖·‖_*`: shrinks every singular value by `tau`.
pub fn svd_threshold(m: &Matrix, tau: f64) -> Result<Matrix> {
    if !(tau >= 0.0) {
        return Err(invalid!("threshold must be non-negative, got {tau}"));
    }
    let Some(svd) = svd_above(m, tau)? else {
        return Ok(Matrix::zeros(m.rows(), m.cols()));
    };
    let mut u = svd.u;
    u.scale_columns(&svd.s.iter().map(|s| (s - tau).max(0.0)).collect::<Vec<_>>());
    u.matmul_t(&svd.v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RpcaOptions {
    /// Weight of the ℓ1 term; `None` means `1 / sqrt(max_k I_k)`.
    pub lambda: Option<f64>,
    /// ADMM penalty; `None` means `MU_SCALE · Π I_k / ‖X‖_1`.
    pub mu: Option<f64>,
    pub max_iters: usize,
    /// Stop once the combined residual is at most `tol`; `0` runs exactly
    /// `max_iters` iterations.
    pub tol: f64,
    /// Recorded for reproducibility; the iteration itself is deterministic.
    pub seed: u64,
}

/// Constant in the default penalty `μ = MU_SCALE · Π I_k / ‖X‖_1`.
pub const MU_SCALE: f64 = 0.1;

impl Default for RpcaOptions {
    fn default() -> Self {
        Self { lambda: None, mu: None, max_iters: 200, tol: 1e-7, seed: 0 }
    }
}

impl RpcaOptions {
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// `(λ, μ)` for the given input after applying the defaults.
    pub fn resolve(&self, x: &DenseTensor) -> Result<(f64, f64)> {
        let lambda = self
            .lambda
            .unwrap_or_else(|| 1.0 / (*x.shape().iter().max().unwrap_or(&1) as f64).sqrt());
        let l1 = x.l1_norm();
        let mu = self
            .mu
            .unwrap_or(if l1 > 0.0 { MU_SCALE * x.len() as f64 / l1 } else { 1.0 });
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid!("lambda must be positive, got {lambda}"));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(invalid!("mu must be positive, got {mu}"));
        }
        if self.max_iters == 0 {
            return Err(invalid!("max_iters must be at least 1"));
        }
        if !(self.tol >= 0.0) {
            return Err(invalid!("tol must be non-negative, got {}", self.tol));
        }
        Ok((lambda, mu))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RpcaResult {
    pub low_rank: DenseTensor,
    pub sparse: DenseTensor,
    /// Combined ADMM residual after each iteration, relative to `‖X‖_F`:
    /// the constraint violations `‖X − L − S‖`, `‖L − J_n‖` together with the
    /// change in `(J_1, …, J_N, S)` since the previous iteration, in
    /// root-sum-square. It is non-increasing for this two-block splitting
    /// and bounds the feasibility error `‖L + S − X‖_F / ‖X‖_F`.
    pub residual_trace: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

pub fn robust_tpca(x: &DenseTensor, opts: &RpcaOptions) -> Result<RpcaResult> {
    if x.order() < 2 {
        return Err(invalid!("robust tensor PCA needs order >= 2, got {}", x.order()));
    }
    let (lambda, mu) = opts.resolve(x)?;
    let order = x.order();
    let shape = x.shape().to_vec();
    let scale = x.frobenius_norm().max(1e-15);

    let mut low_rank = x.clone();
    let mut sparse = DenseTensor::zeros(&shape)?;
    let mut blocks: Vec<DenseTensor> = vec![x.clone(); order];
    let mut block_duals: Vec<DenseTensor> = vec![DenseTensor::zeros(&shape)?; order];
    let mut dual = DenseTensor::zeros(&shape)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let inv_mu = 1.0 / mu;

    for _ in 0..opts.max_iters {
        // Consensus: average of the block targets and the data-fit target.
        let mut acc = x.sub(&sparse)?.zip_map(&dual, |a, z| a + z * inv_mu)?;
        for (j, y) in blocks.iter().zip(&block_duals) {
            acc = acc.add(&j.zip_map(y, |a, b| a - b * inv_mu)?)?;
        }
        low_rank = acc.scaled(1.0 / (order as f64 + 1.0));

        let new_blocks = block_duals
            .par_iter()
            .enumerate()
            .map(|(n, y)| {
                let target = low_rank.zip_map(y, |l, b| l + b * inv_mu)?;
                let shrunk = svd_threshold(&target.unfold(n)?, inv_mu)?;
                DenseTensor::fold(&shrunk, n, &shape)
            })
            .collect::<Result<Vec<_>>>()?;
        let sparse_target = x.sub(&low_rank)?.zip_map(&dual, |a, z| a + z * inv_mu)?;
        let new_sparse = soft_threshold(&sparse_target, lambda * inv_mu)?;

        let mut squared = squared_distance(&new_sparse, &sparse)?;
        for (old, new) in blocks.iter().zip(&new_blocks) {
            squared += squared_distance(old, new)?;
        }
        blocks = new_blocks;
        sparse = new_sparse;

        for (j, y) in blocks.iter().zip(block_duals.iter_mut()) {
            let gap = low_rank.sub(j)?;
            squared += gap.frobenius_norm().powi(2);
            *y = y.zip_map(&gap, |a, g| a + mu * g)?;
        }
        let misfit = x.sub(&low_rank)?.sub(&sparse)?;
        squared += misfit.frobenius_norm().powi(2);
        dual = dual.zip_map(&misfit, |a, r| a + mu * r)?;

        let residual = squared.sqrt() / scale;
        trace.push(residual);
        if opts.tol > 0.0 && residual <= opts.tol {
            converged = true;
            break;
        }
    }
    Ok(RpcaResult { low_rank, sparse, iterations_run: trace.len(), residual_trace: trace, converged })
}

fn squared_distance(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    Ok(a.sub(b)?.frobenius_norm().powi(2))
}

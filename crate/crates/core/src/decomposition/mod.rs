//! Iterative decompositions: CP-ALS, HOSVD/HOOI and their non-negative
//! multiplicative-update counterparts.
//!
//! Every fit records the relative reconstruction error
//! `‖x − x̂‖_F / ‖x‖_F` after each sweep (`‖x̂‖_F` when `x` is zero) and
//! stops once `|e_t − e_{t−1}| / max(e_{t−1}, 1e-15) < tol` or after
//! `max_iters` sweeps. Setting `tol = 0` runs exactly `max_iters` sweeps.

mod cp;
mod nonneg;
pub(crate) mod svd;
mod tucker;

use serde::{Deserialize, Serialize};

pub use cp::{cp_als, cp_als_from};
pub use nonneg::{nn_cp_mu, nn_tucker_mu};
pub use svd::{partial_svd, Svd};
pub use tucker::{tucker_hooi, tucker_hosvd};

use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::random;
use crate::tensor::DenseTensor;

/// Target rank of a decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rank {
    /// CP rank, or the same Tucker rank on every mode.
    Single(usize),
    /// Per-mode Tucker ranks.
    PerMode(Vec<usize>),
}

impl Rank {
    pub(crate) fn single(&self) -> Result<usize> {
        match self {
            Rank::Single(r) if *r >= 1 => Ok(*r),
            Rank::PerMode(v) if !v.is_empty() && v.iter().all(|&r| r == v[0] && r >= 1) => Ok(v[0]),
            other => Err(invalid!("expected a single positive rank, got {other:?}")),
        }
    }

    pub(crate) fn per_mode(&self, order: usize) -> Result<Vec<usize>> {
        let ranks = match self {
            Rank::Single(r) => vec![*r; order],
            Rank::PerMode(v) => v.clone(),
        };
        if ranks.len() != order {
            return Err(invalid!("{} ranks given for an order-{order} tensor", ranks.len()));
        }
        if ranks.contains(&0) {
            return Err(invalid!("ranks must be positive, got {ranks:?}"));
        }
        Ok(ranks)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    /// Leading singular vectors of each unfolding, padded with seeded
    /// Gaussian columns when the rank exceeds the dimension.
    Svd,
    Random,
}

impl std::str::FromStr for Init {
    type Err = crate::error::TensorError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svd" => Ok(Init::Svd),
            "random" => Ok(Init::Random),
            other => Err(invalid!("unknown init {other:?}, expected svd or random")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub rank: Rank,
    pub max_iters: usize,
    pub tol: f64,
    pub init: Init,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { rank: Rank::Single(1), max_iters: 100, tol: 1e-8, init: Init::Svd, seed: 0 }
    }
}

impl FitOptions {
    pub fn cp(rank: usize) -> Self {
        Self { rank: Rank::Single(rank), ..Self::default() }
    }

    pub fn tucker(ranks: &[usize]) -> Self {
        Self { rank: Rank::PerMode(ranks.to_vec()), ..Self::default() }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Disables the tolerance test so exactly `iters` sweeps run.
    pub fn fixed_iterations(self, iters: usize) -> Self {
        self.with_max_iters(iters).with_tol(0.0)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid!("max_iters must be at least 1"));
        }
        if !(self.tol >= 0.0) {
            return Err(invalid!("tol must be non-negative, got {}", self.tol));
        }
        Ok(())
    }
}

/// Per-sweep objective history of an iterative fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub objective_trace: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    pub seed: u64,
}

impl FitReport {
    pub fn final_objective(&self) -> Option<f64> {
        self.objective_trace.last().copied()
    }
}

/// Tracks the objective and applies the shared stopping rule.
pub(crate) struct Progress {
    trace: Vec<f64>,
    tol: f64,
    converged: bool,
}

impl Progress {
    pub(crate) fn new(tol: f64) -> Self {
        Self { trace: Vec::new(), tol, converged: false }
    }

    /// Records one sweep; returns true when the fit should stop.
    pub(crate) fn record(&mut self, objective: f64) -> bool {
        if let Some(&prev) = self.trace.last() {
            if (objective - prev).abs() / prev.max(1e-15) < self.tol {
                self.converged = true;
            }
        }
        self.trace.push(objective);
        self.converged
    }

    pub(crate) fn finish(self, seed: u64) -> FitReport {
        FitReport {
            iterations_run: self.trace.len(),
            objective_trace: self.trace,
            converged: self.converged,
            seed,
        }
    }
}

pub(crate) fn unfold_all(x: &DenseTensor) -> Result<Vec<Matrix>> {
    (0..x.order()).map(|n| x.unfold(n)).collect()
}

/// Factor matrices `I_n × rank` per the chosen initialization.
pub(crate) fn initial_factors(x: &DenseTensor, ranks: &[usize], init: Init, seed: u64) -> Result<Vec<Matrix>> {
    let mut rng = random::seeded(seed);
    x.shape()
        .iter()
        .zip(ranks)
        .enumerate()
        .map(|(n, (&dim, &rank))| match init {
            Init::Random => Ok(random::gaussian_matrix(&mut rng, dim, rank)),
            Init::Svd => {
                let k = rank.min(dim);
                let lead = partial_svd(&x.unfold(n)?, k)?.u;
                if k == rank {
                    return Ok(lead);
                }
                let pad = random::gaussian_matrix(&mut rng, dim, rank - k);
                Ok(Matrix::from_fn(dim, rank, |i, j| if j < k { lead[(i, j)] } else { pad[(i, j - k)] }))
            }
        })
        .collect()
}

/// Rescales non-zero columns to unit norm, returning the norms.
pub(crate) fn normalize_columns(m: &mut Matrix) -> Vec<f64> {
    let norms = m.column_norms();
    let inv: Vec<f64> = norms.iter().map(|&n| if n > 0.0 { 1.0 / n } else { 1.0 }).collect();
    m.scale_columns(&inv);
    norms
}

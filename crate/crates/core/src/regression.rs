//! Ridge-regularized low-rank tensor regression.
//!
//! Responses are modelled as `y_i ≈ ⟨W, X_i⟩ + b` with the weight tensor `W`
//! held in Kruskal form `⟦U_1, …, U_N⟧` or Tucker form `⟦G; U_1, …, U_N⟧`.
//! The fitted objective is
//!
//! ```text
//! Σ_i (y_i − ⟨W, X_i⟩ − b)² + reg · (Σ_n ‖U_n‖_F² [+ ‖G‖_F²])
//! ```
//!
//! minimized by cycling over the blocks. Each block is linear in the
//! prediction, so it is solved exactly (jointly with `b`) from its ridge
//! normal equations. The objective after every sweep goes into the report.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{khatri_rao, multi_mode_dot_factors};
use crate::decomposition::{FitReport, Progress};
use crate::error::{invalid, mismatch, Result, TensorError};
use crate::kruskal::KruskalTensor;
use crate::linalg::sym_pinv;
use crate::matrix::Matrix;
use crate::random;
use crate::tensor::DenseTensor;
use crate::tucker::TuckerTensor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressionOptions {
    pub max_iters: usize,
    /// Relative objective change below which fitting stops.
    pub tol: f64,
    pub seed: u64,
}

impl Default for RegressionOptions {
    fn default() -> Self {
        Self { max_iters: 100, tol: 1e-8, seed: 0 }
    }
}

impl RegressionOptions {
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
}

/// Low-rank weight of a regression model.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Kruskal(KruskalTensor),
    Tucker(TuckerTensor),
}

impl Weight {
    pub fn shape(&self) -> Vec<usize> {
        match self {
            Weight::Kruskal(k) => k.shape(),
            Weight::Tucker(t) => t.shape(),
        }
    }

    pub fn to_tensor(&self) -> Result<DenseTensor> {
        match self {
            Weight::Kruskal(k) => k.to_tensor(),
            Weight::Tucker(t) => t.to_tensor(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressionModel {
    pub weight: Weight,
    pub bias: f64,
    pub reg: f64,
    pub fit_report: FitReport,
}

impl RegressionModel {
    /// `⟨W, X_i⟩ + b` for every covariate.
    pub fn predict(&self, xs: &[DenseTensor]) -> Result<Vec<f64>> {
        let w = self.weight.to_tensor()?;
        xs.iter()
            .map(|x| {
                if x.shape() != w.shape() {
                    return Err(mismatch!("covariate shape {:?} differs from model shape {:?}", x.shape(), w.shape()));
                }
                Ok(w.inner(x)? + self.bias)
            })
            .collect()
    }
}

/// Free-function form of [`RegressionModel::predict`].
pub fn predict(model: &RegressionModel, xs: &[DenseTensor]) -> Result<Vec<f64>> {
    model.predict(xs)
}

struct Problem<'a> {
    xs: &'a [DenseTensor],
    y: &'a [f64],
    reg: f64,
    shape: Vec<usize>,
}

impl<'a> Problem<'a> {
    fn new(xs: &'a [DenseTensor], y: &'a [f64], reg: f64, opts: &RegressionOptions) -> Result<Self> {
        if xs.is_empty() {
            return Err(invalid!("regression needs at least one sample"));
        }
        if xs.len() != y.len() {
            return Err(mismatch!("{} covariates but {} responses", xs.len(), y.len()));
        }
        if !(reg >= 0.0) || !reg.is_finite() {
            return Err(invalid!("ridge coefficient must be finite and non-negative, got {reg}"));
        }
        if opts.max_iters == 0 {
            return Err(invalid!("max_iters must be at least 1"));
        }
        if !(opts.tol >= 0.0) {
            return Err(invalid!("tol must be non-negative, got {}", opts.tol));
        }
        let shape = xs[0].shape().to_vec();
        if let Some(i) = xs.iter().position(|x| x.shape() != shape.as_slice()) {
            return Err(mismatch!("covariate {i} has shape {:?}, expected {shape:?}", xs[i].shape()));
        }
        let finite = |v: &f64| v.is_finite();
        if !y.iter().all(finite) || !xs.iter().all(|x| x.as_slice().iter().all(finite)) {
            return Err(TensorError::Numeric("non-finite covariate or response".into()));
        }
        Ok(Self { xs, y, reg, shape })
    }

    fn mean_response(&self) -> f64 {
        self.y.iter().sum::<f64>() / self.y.len() as f64
    }

    fn loss(&self, w: &DenseTensor, bias: f64) -> Result<f64> {
        let mut total = 0.0;
        for (x, &y) in self.xs.iter().zip(self.y) {
            let r = y - w.inner(x)? - bias;
            total += r * r;
        }
        Ok(total)
    }

    /// Exact minimizer over `(θ, b)` of `Σ_i (y_i − ⟨z_i, θ⟩ − b)² + reg‖θ‖²`,
    /// where `z_i` is the i-th row of `design`.
    fn solve_block(&self, design: &Matrix) -> Result<(Vec<f64>, f64)> {
        let (m, p) = design.shape();
        let augmented = Matrix::from_fn(m, p + 1, |i, j| if j < p { design[(i, j)] } else { 1.0 });
        let mut normal = augmented.gram();
        for j in 0..p {
            normal[(j, j)] += self.reg;
        }
        let rhs = augmented.tmatmul(&Matrix::column_vector(self.y))?;
        let mut theta = sym_pinv(&normal)?.matmul(&rhs)?.into_vec();
        let bias = theta.pop().expect("bias entry");
        Ok((theta, bias))
    }

    /// Stacks one flattened row per sample.
    fn design(&self, width: usize, row: impl Fn(&DenseTensor) -> Result<Vec<f64>> + Sync) -> Result<Matrix> {
        let rows: Vec<Vec<f64>> = self.xs.par_iter().map(&row).collect::<Result<_>>()?;
        Matrix::new(self.xs.len(), width, rows.concat())
    }
}

fn squared_norm(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum()
}

/// Ridge regression with a rank-`rank` Kruskal weight (unit weights, the
/// scale lives in the factors).
pub fn kruskal_ridge_fit(
    xs: &[DenseTensor],
    y: &[f64],
    rank: usize,
    reg: f64,
    opts: &RegressionOptions,
) -> Result<RegressionModel> {
    kruskal_fit_observed(xs, y, rank, reg, opts, &mut |_| {})
}

/// As [`kruskal_ridge_fit`], calling `observe` with the objective after
/// every block update.
pub(crate) fn kruskal_fit_observed(
    xs: &[DenseTensor],
    y: &[f64],
    rank: usize,
    reg: f64,
    opts: &RegressionOptions,
    observe: &mut dyn FnMut(f64),
) -> Result<RegressionModel> {
    let problem = Problem::new(xs, y, reg, opts)?;
    if rank == 0 {
        return Err(invalid!("rank must be at least 1"));
    }
    let shape = problem.shape.clone();
    let order = shape.len();

    let mut rng = random::seeded(opts.seed);
    let mut factors: Vec<Matrix> = shape.iter().map(|&d| random::gaussian_matrix(&mut rng, d, rank)).collect();
    let scale = KruskalTensor::from_factors(factors.clone())?.to_tensor()?.frobenius_norm();
    if scale > 0.0 {
        let per_factor = scale.powf(-1.0 / order as f64);
        factors.iter_mut().for_each(|f| f.scale(per_factor));
    }
    let mut bias = problem.mean_response();
    let objective = |factors: &[Matrix], bias: f64| -> Result<f64> {
        let w = KruskalTensor::from_factors(factors.to_vec())?.to_tensor()?;
        let penalty: f64 = factors.iter().map(|f| squared_norm(f.as_slice())).sum();
        Ok(problem.loss(&w, bias)? + reg * penalty)
    };

    let mut progress = Progress::new(opts.tol);
    for _ in 0..opts.max_iters {
        for n in 0..order {
            let others: Vec<&Matrix> = (0..order).filter(|&k| k != n).map(|k| &factors[k]).collect();
            let kr = if others.is_empty() { Matrix::filled(1, rank, 1.0) } else { khatri_rao(&others)? };
            let design = problem.design(shape[n] * rank, |x| Ok(x.unfold(n)?.matmul(&kr)?.into_vec()))?;
            let (theta, b) = problem.solve_block(&design)?;
            factors[n] = Matrix::new(shape[n], rank, theta)?;
            bias = b;
            observe(objective(&factors, bias)?);
        }
        if progress.record(objective(&factors, bias)?) {
            break;
        }
    }

    Ok(RegressionModel {
        weight: Weight::Kruskal(KruskalTensor::from_factors(factors)?),
        bias,
        reg,
        fit_report: progress.finish(opts.seed),
    })
}

/// Ridge regression with a Tucker weight of multilinear rank `ranks`. The
/// ridge term covers the core as well as every factor.
pub fn tucker_ridge_fit(
    xs: &[DenseTensor],
    y: &[f64],
    ranks: &[usize],
    reg: f64,
    opts: &RegressionOptions,
) -> Result<RegressionModel> {
    tucker_fit_observed(xs, y, ranks, reg, opts, &mut |_| {})
}

pub(crate) fn tucker_fit_observed(
    xs: &[DenseTensor],
    y: &[f64],
    ranks: &[usize],
    reg: f64,
    opts: &RegressionOptions,
    observe: &mut dyn FnMut(f64),
) -> Result<RegressionModel> {
    let problem = Problem::new(xs, y, reg, opts)?;
    let shape = problem.shape.clone();
    if ranks.len() != shape.len() {
        return Err(invalid!("{} ranks given for order-{} covariates", ranks.len(), shape.len()));
    }
    if let Some(k) = (0..shape.len()).find(|&k| ranks[k] == 0 || ranks[k] > shape[k]) {
        return Err(invalid!("rank {} for mode {k} must lie in 1..={}", ranks[k], shape[k]));
    }

    let mut rng = random::seeded(opts.seed);
    let mut core = DenseTensor::new(ranks.to_vec(), random::gaussian_vec(&mut rng, ranks.iter().product()))?;
    let mut factors: Vec<Matrix> =
        shape.iter().zip(ranks).map(|(&d, &r)| random::gaussian_matrix(&mut rng, d, r)).collect();
    let scale = TuckerTensor::new(core.clone(), factors.clone())?.to_tensor()?.frobenius_norm();
    if scale > 0.0 {
        core = core.scaled(1.0 / scale);
    }
    let mut bias = problem.mean_response();
    let objective = |core: &DenseTensor, factors: &[Matrix], bias: f64| -> Result<f64> {
        let w = multi_mode_dot_factors(core, factors, None, false)?;
        let penalty: f64 =
            factors.iter().map(|f| squared_norm(f.as_slice())).sum::<f64>() + squared_norm(core.as_slice());
        Ok(problem.loss(&w, bias)? + reg * penalty)
    };

    let mut progress = Progress::new(opts.tol);
    for _ in 0..opts.max_iters {
        for n in 0..shape.len() {
            let core_n = core.unfold(n)?;
            let design = problem.design(shape[n] * ranks[n], |x| {
                let partial = multi_mode_dot_factors(x, &factors, Some(n), true)?.unfold(n)?;
                Ok(partial.matmul_t(&core_n)?.into_vec())
            })?;
            let (theta, b) = problem.solve_block(&design)?;
            factors[n] = Matrix::new(shape[n], ranks[n], theta)?;
            bias = b;
            observe(objective(&core, &factors, bias)?);
        }
        let design = problem.design(core.len(), |x| Ok(multi_mode_dot_factors(x, &factors, None, true)?.into_vec()))?;
        let (theta, b) = problem.solve_block(&design)?;
        core = DenseTensor::new(ranks.to_vec(), theta)?;
        bias = b;
        let value = objective(&core, &factors, bias)?;
        observe(value);
        if progress.record(value) {
            break;
        }
    }

    Ok(RegressionModel {
        weight: Weight::Tucker(TuckerTensor::new(core, factors)?),
        bias,
        reg,
        fit_report: progress.finish(opts.seed),
    })
}

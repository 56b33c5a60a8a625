use crate::algebra::{hadamard, khatri_rao};
use crate::error::{mismatch, Result};
use crate::kruskal::KruskalTensor;
use crate::linalg::sym_pinv;
use crate::matrix::Matrix;
use crate::tensor::DenseTensor;

use super::{initial_factors, normalize_columns, unfold_all, FitOptions, FitReport, Progress};

/// CP decomposition by alternating least squares.
///
/// Each sweep solves, for every mode `n`,
/// `U_n ← X_(n) · (⊙_{k≠n} U_k) · pinv(∗_{k≠n} U_kᵀU_k)` and moves the
/// column norms of the new factor into the weights.
pub fn cp_als(x: &DenseTensor, opts: &FitOptions) -> Result<(KruskalTensor, FitReport)> {
    opts.validate()?;
    let rank = opts.rank.single()?;
    let factors = initial_factors(x, &vec![rank; x.order()], opts.init, opts.seed)?;
    cp_als_from(x, KruskalTensor::from_factors(factors)?, opts)
}

/// As [`cp_als`], starting from the supplied model instead of `opts.init`.
pub fn cp_als_from(
    x: &DenseTensor,
    init: KruskalTensor,
    opts: &FitOptions,
) -> Result<(KruskalTensor, FitReport)> {
    opts.validate()?;
    if init.shape() != x.shape() {
        return Err(mismatch!("initial model shape {:?} does not match tensor {:?}", init.shape(), x.shape()));
    }
    let order = x.order();
    let unfoldings = unfold_all(x)?;
    let (mut weights, mut factors) = init.into_parts();
    let mut grams: Vec<Matrix> = factors.iter().map(Matrix::gram).collect();
    let mut progress = Progress::new(opts.tol);

    for _ in 0..opts.max_iters {
        for n in 0..order {
            let mut updated = if order == 1 {
                // Single mode: the least-squares factor is the data itself.
                Matrix::from_fn(x.len(), weights.len(), |i, _| x.as_slice()[i] / weights.len() as f64)
            } else {
                let others: Vec<&Matrix> = (0..order).filter(|&k| k != n).map(|k| &factors[k]).collect();
                let other_grams: Vec<&Matrix> = (0..order).filter(|&k| k != n).map(|k| &grams[k]).collect();
                let mttkrp = unfoldings[n].matmul(&khatri_rao(&others)?)?;
                mttkrp.matmul(&sym_pinv(&hadamard(&other_grams)?)?)?
            };
            weights = normalize_columns(&mut updated);
            grams[n] = updated.gram();
            factors[n] = updated;
        }
        let model = KruskalTensor::new(weights.clone(), factors.clone())?;
        if progress.record(x.relative_error(&model.to_tensor()?)?) {
            break;
        }
    }
    Ok((KruskalTensor::new(weights, factors)?, progress.finish(opts.seed)))
}

use crate::algebra::multi_mode_dot_factors;
use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::tensor::DenseTensor;
use crate::tucker::TuckerTensor;

use super::svd::leading_left_vectors;
use super::{partial_svd, FitOptions, FitReport, Progress};

fn checked_ranks(x: &DenseTensor, opts_ranks: &[usize]) -> Result<()> {
    if opts_ranks.len() != x.order() {
        return Err(invalid!("{} ranks given for an order-{} tensor", opts_ranks.len(), x.order()));
    }
    for (k, (&r, &dim)) in opts_ranks.iter().zip(x.shape()).enumerate() {
        if r == 0 || r > dim {
            return Err(invalid!("rank {r} for mode {k} must lie in 1..={dim}"));
        }
    }
    Ok(())
}

/// Truncated higher-order SVD: each factor holds the leading left singular
/// vectors of the matching unfolding and the core is `x ×_k U_kᵀ`.
pub fn tucker_hosvd(x: &DenseTensor, ranks: &[usize]) -> Result<TuckerTensor> {
    checked_ranks(x, ranks)?;
    let factors = (0..x.order())
        .map(|n| Ok(partial_svd(&x.unfold(n)?, ranks[n])?.u))
        .collect::<Result<Vec<Matrix>>>()?;
    let core = multi_mode_dot_factors(x, &factors, None, true)?;
    TuckerTensor::new(core, factors)
}

/// Higher-order orthogonal iteration, initialized from the HOSVD.
///
/// Each sweep replaces `U_n` with the leading left singular vectors of the
/// mode-`n` unfolding of `x` projected on every other factor. A rank larger
/// than the product of the other ranks is padded with orthonormal columns.
pub fn tucker_hooi(x: &DenseTensor, opts: &FitOptions) -> Result<(TuckerTensor, FitReport)> {
    opts.validate()?;
    let ranks = opts.rank.per_mode(x.order())?;
    let (mut core, mut factors) = tucker_hosvd(x, &ranks)?.into_parts();
    let mut progress = Progress::new(opts.tol);
    for _ in 0..opts.max_iters {
        for n in 0..x.order() {
            let projected = multi_mode_dot_factors(x, &factors, Some(n), true)?;
            factors[n] = leading_left_vectors(&projected.unfold(n)?, ranks[n])?;
        }
        core = multi_mode_dot_factors(x, &factors, None, true)?;
        let approx = multi_mode_dot_factors(&core, &factors, None, false)?;
        if progress.record(x.relative_error(&approx)?) {
            break;
        }
    }
    Ok((TuckerTensor::new(core, factors)?, progress.finish(opts.seed)))
}

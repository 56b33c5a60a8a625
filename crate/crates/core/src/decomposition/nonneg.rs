//! Non-negative CP and Tucker by multiplicative updates.
//!
//! Every update has the form `A ← A ∗ N ⊘ (D + ε)` with `N`, `D` built from
//! non-negative quantities, so entries never leave the non-negative orthant.

use rand::Rng;

use crate::algebra::{hadamard, khatri_rao, multi_mode_dot_factors};
use crate::error::{invalid, Result};
use crate::kruskal::KruskalTensor;
use crate::matrix::Matrix;
use crate::random;
use crate::tensor::DenseTensor;
use crate::tucker::TuckerTensor;

use super::{normalize_columns, unfold_all, FitOptions, FitReport, Progress};

/// Denominator guard.
pub const MU_EPSILON: f64 = 1e-12;
/// Offset added to |Gaussian| initial entries so no entry starts at zero.
const INIT_OFFSET: f64 = 0.1;

fn check_nonnegative(x: &DenseTensor) -> Result<()> {
    match x.as_slice().iter().position(|&v| !(v >= 0.0)) {
        Some(i) => Err(invalid!(
            "non-negative decomposition needs entries >= 0, found {} at flat offset {i}",
            x.as_slice()[i]
        )),
        None => Ok(()),
    }
}

fn positive_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    random::gaussian_matrix(rng, rows, cols).map(|v| v.abs() + INIT_OFFSET)
}

fn multiplicative_step(current: &Matrix, numerator: &Matrix, denominator: &Matrix) -> Result<Matrix> {
    let ratio = numerator.zip_map(denominator, |n, d| n / (d + MU_EPSILON))?;
    current.zip_map(&ratio, |a, r| a * r)
}

/// Non-negative CP: `U_n ← U_n ∗ (X_(n) KR_n) ⊘ (U_n H_n + ε)`, where
/// `KR_n` is the Khatri-Rao product of the other factors and `H_n` the
/// Hadamard product of their Grams. Weights are folded out at the end.
pub fn nn_cp_mu(x: &DenseTensor, opts: &FitOptions) -> Result<(KruskalTensor, FitReport)> {
    opts.validate()?;
    check_nonnegative(x)?;
    let rank = opts.rank.single()?;
    let order = x.order();
    let mut rng = random::seeded(opts.seed);
    let mut factors: Vec<Matrix> = x.shape().iter().map(|&d| positive_matrix(&mut rng, d, rank)).collect();
    let mut grams: Vec<Matrix> = factors.iter().map(Matrix::gram).collect();
    let unfoldings = unfold_all(x)?;
    let mut progress = Progress::new(opts.tol);

    for _ in 0..opts.max_iters {
        for n in 0..order {
            let (numerator, h) = if order == 1 {
                (Matrix::from_fn(x.len(), rank, |i, _| x.as_slice()[i]), Matrix::filled(rank, rank, 1.0))
            } else {
                let others: Vec<&Matrix> = (0..order).filter(|&k| k != n).map(|k| &factors[k]).collect();
                let other_grams: Vec<&Matrix> = (0..order).filter(|&k| k != n).map(|k| &grams[k]).collect();
                (unfoldings[n].matmul(&khatri_rao(&others)?)?, hadamard(&other_grams)?)
            };
            let denominator = factors[n].matmul(&h)?;
            factors[n] = multiplicative_step(&factors[n], &numerator, &denominator)?;
            grams[n] = factors[n].gram();
        }
        let model = KruskalTensor::from_factors(factors.clone())?;
        if progress.record(x.relative_error(&model.to_tensor()?)?) {
            break;
        }
    }

    let mut weights = vec![1.0; rank];
    for f in factors.iter_mut() {
        let norms = normalize_columns(f);
        weights.iter_mut().zip(norms).for_each(|(w, n)| *w *= n);
    }
    Ok((KruskalTensor::new(weights, factors)?, progress.finish(opts.seed)))
}

/// Non-negative Tucker. Factor updates use `B = G ×_{k≠n} U_k`:
/// `U_n ← U_n ∗ (X_(n) B_(n)ᵀ) ⊘ (U_n B_(n) B_(n)ᵀ + ε)`; the core update is
/// `G ← G ∗ (X ×_k U_kᵀ) ⊘ (G ×_k U_kᵀU_k + ε)`.
pub fn nn_tucker_mu(x: &DenseTensor, opts: &FitOptions) -> Result<(TuckerTensor, FitReport)> {
    opts.validate()?;
    check_nonnegative(x)?;
    let ranks = opts.rank.per_mode(x.order())?;
    if let Some(k) = (0..x.order()).find(|&k| ranks[k] > x.shape()[k]) {
        return Err(invalid!("rank {} for mode {k} exceeds dimension {}", ranks[k], x.shape()[k]));
    }
    let mut rng = random::seeded(opts.seed);
    let core_values = random::gaussian_vec(&mut rng, ranks.iter().product());
    let mut core = DenseTensor::new(ranks.clone(), core_values.iter().map(|v| v.abs() + INIT_OFFSET).collect())?;
    let mut factors: Vec<Matrix> =
        x.shape().iter().zip(&ranks).map(|(&d, &r)| positive_matrix(&mut rng, d, r)).collect();
    let unfoldings = unfold_all(x)?;
    let mut progress = Progress::new(opts.tol);

    for _ in 0..opts.max_iters {
        for n in 0..x.order() {
            let partial = multi_mode_dot_factors(&core, &factors, Some(n), false)?.unfold(n)?;
            let numerator = unfoldings[n].matmul_t(&partial)?;
            let denominator = factors[n].matmul(&partial.matmul_t(&partial)?)?;
            factors[n] = multiplicative_step(&factors[n], &numerator, &denominator)?;
        }
        let numerator = multi_mode_dot_factors(x, &factors, None, true)?;
        let grams: Vec<Matrix> = factors.iter().map(Matrix::gram).collect();
        let denominator = multi_mode_dot_factors(&core, &grams, None, false)?;
        let ratio = numerator.zip_map(&denominator, |n, d| n / (d + MU_EPSILON))?;
        core = core.zip_map(&ratio, |g, r| g * r)?;

        let approx = multi_mode_dot_factors(&core, &factors, None, false)?;
        if progress.record(x.relative_error(&approx)?) {
            break;
        }
    }
    Ok((TuckerTensor::new(core, factors)?, progress.finish(opts.seed)))
}

//! Multilinear products on dense tensors and matrices.
//!
//! Khatri-Rao products enumerate their inputs in list order with the first
//! factor's row index varying slowest. Combined with the row-major unfolding
//! this gives, for a Kruskal tensor,
//! `X_(n) = U_n · diag(w) · (⊙_{k≠n, increasing k} U_k)ᵀ`.

use crate::error::{invalid, mismatch, Result};
use crate::matrix::Matrix;
use crate::tensor::DenseTensor;

/// `x ×_mode u`: contracts mode `mode` of `x` against the columns of `u`.
///
/// The result has `u.rows()` in place of `I_mode` and satisfies
/// `unfold(result, mode) == u · unfold(x, mode)`.
pub fn mode_dot_matrix(x: &DenseTensor, u: &Matrix, mode: usize) -> Result<DenseTensor> {
    x.check_mode(mode)?;
    if u.cols() != x.shape()[mode] {
        return Err(mismatch!(
            "mode-{mode} product needs {} columns, matrix is {}x{}",
            x.shape()[mode],
            u.rows(),
            u.cols()
        ));
    }
    let product = u.matmul(&x.unfold(mode)?)?;
    let mut shape = x.shape().to_vec();
    shape[mode] = u.rows();
    DenseTensor::fold(&product, mode, &shape)
}

/// `x ×_mode v`: contracts mode `mode` against a vector, dropping that mode.
/// Contracting an order-1 tensor yields an order-0 scalar tensor.
pub fn mode_dot_vector(x: &DenseTensor, v: &[f64], mode: usize) -> Result<DenseTensor> {
    x.check_mode(mode)?;
    if v.len() != x.shape()[mode] {
        return Err(mismatch!(
            "mode-{mode} vector product needs length {}, got {}",
            x.shape()[mode],
            v.len()
        ));
    }
    let row = Matrix::new(1, v.len(), v.to_vec())?;
    let contracted = mode_dot_matrix(x, &row, mode)?;
    if x.order() == 1 {
        return Ok(DenseTensor::scalar(contracted.as_slice()[0]));
    }
    let mut shape = x.shape().to_vec();
    shape.remove(mode);
    DenseTensor::new(shape, contracted.into_vec())
}

/// Applies `x ×_{m1} U1 ×_{m2} U2 …` in increasing mode order. With
/// `transpose`, each matrix is applied transposed (`Uᵀ`), which projects onto
/// the column spaces of the factors.
pub fn multi_mode_dot(
    x: &DenseTensor,
    matrices: &[(&Matrix, usize)],
    transpose: bool,
) -> Result<DenseTensor> {
    let mut ordered: Vec<(&Matrix, usize)> = matrices.to_vec();
    ordered.sort_by_key(|&(_, mode)| mode);
    if let Some(w) = ordered.windows(2).find(|w| w[0].1 == w[1].1) {
        return Err(invalid!("mode {} appears more than once", w[0].1));
    }
    let mut out = x.clone();
    for (u, mode) in ordered {
        out = if transpose {
            mode_dot_matrix(&out, &u.transpose(), mode)?
        } else {
            mode_dot_matrix(&out, u, mode)?
        };
    }
    Ok(out)
}

/// Multiplies mode `k` by `factors[k]` for every mode, except `skip` if given.
pub fn multi_mode_dot_factors(
    x: &DenseTensor,
    factors: &[Matrix],
    skip: Option<usize>,
    transpose: bool,
) -> Result<DenseTensor> {
    if factors.len() != x.order() {
        return Err(mismatch!("{} factors for an order-{} tensor", factors.len(), x.order()));
    }
    let pairs: Vec<(&Matrix, usize)> = factors
        .iter()
        .enumerate()
        .filter(|&(k, _)| Some(k) != skip)
        .map(|(k, u)| (u, k))
        .collect();
    multi_mode_dot(x, &pairs, transpose)
}

/// Kronecker product `a ⊗ b`.
pub fn kronecker(a: &Matrix, b: &Matrix) -> Matrix {
    let (br, bc) = b.shape();
    let mut out = Matrix::zeros(a.rows() * br, a.cols() * bc);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            for k in 0..br {
                let row = out.row_mut(i * br + k);
                for (o, &bv) in row[j * bc..(j + 1) * bc].iter_mut().zip(b.row(k)) {
                    *o = aij * bv;
                }
            }
        }
    }
    out
}

/// Left-to-right Kronecker product of a non-empty list.
pub fn kronecker_all(matrices: &[&Matrix]) -> Result<Matrix> {
    let (first, rest) = matrices
        .split_first()
        .ok_or_else(|| invalid!("kronecker product of an empty list"))?;
    Ok(rest.iter().fold((*first).clone(), |acc, m| kronecker(&acc, m)))
}

/// Column-wise Kronecker product. Row `Σ_k i_k Π_{m>k} rows_m` of the result,
/// column `r`, holds `Π_k M_k(i_k, r)`.
pub fn khatri_rao(matrices: &[&Matrix]) -> Result<Matrix> {
    let (first, rest) = matrices
        .split_first()
        .ok_or_else(|| invalid!("khatri-rao product of an empty list"))?;
    let rank = first.cols();
    if let Some(m) = rest.iter().find(|m| m.cols() != rank) {
        return Err(mismatch!(
            "khatri-rao inputs must share a column count ({rank} vs {})",
            m.cols()
        ));
    }
    let mut acc = (*first).clone();
    for m in rest {
        let mut next = Matrix::zeros(acc.rows() * m.rows(), rank);
        for i in 0..acc.rows() {
            let a_row = acc.row(i);
            for k in 0..m.rows() {
                let out = next.row_mut(i * m.rows() + k);
                for ((o, &a), &b) in out.iter_mut().zip(a_row).zip(m.row(k)) {
                    *o = a * b;
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Elementwise product of a non-empty list of same-shape matrices.
pub fn hadamard(matrices: &[&Matrix]) -> Result<Matrix> {
    let (first, rest) = matrices
        .split_first()
        .ok_or_else(|| invalid!("hadamard product of an empty list"))?;
    let mut acc = (*first).clone();
    for m in rest {
        acc = acc.zip_map(m, |a, b| a * b)?;
    }
    Ok(acc)
}

/// Outer product `v_1 ∘ v_2 ∘ … ∘ v_N`.
pub fn outer(vectors: &[&[f64]]) -> Result<DenseTensor> {
    if vectors.is_empty() {
        return Err(invalid!("outer product of an empty list"));
    }
    let shape: Vec<usize> = vectors.iter().map(|v| v.len()).collect();
    let mut data = vec![1.0];
    for v in vectors {
        data = data.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect();
    }
    DenseTensor::new(shape, data)
}

/// Empirical third-order moment `(1/m) Σ_i x_i ∘ x_i ∘ x_i`.
///
/// Each distinct index triple is computed once and copied to its
/// permutations, so the result is exactly symmetric.
pub fn moment3(samples: &[Vec<f64>]) -> Result<DenseTensor> {
    let d = samples.first().ok_or_else(|| invalid!("moment of an empty sample set"))?.len();
    if d == 0 {
        return Err(invalid!("samples must have positive length"));
    }
    if let Some(s) = samples.iter().find(|s| s.len() != d) {
        return Err(mismatch!("ragged samples: lengths {d} and {}", s.len()));
    }
    let m = samples.len() as f64;
    let mut out = DenseTensor::zeros(&[d, d, d])?;
    for a in 0..d {
        for b in a..d {
            for c in b..d {
                let sum: f64 = samples.iter().map(|x| x[a] * x[b] * x[c]).sum();
                let value = sum / m;
                for idx in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    out.set(&idx, value);
                }
            }
        }
    }
    Ok(out)
}

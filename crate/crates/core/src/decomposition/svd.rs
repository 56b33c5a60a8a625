//! Leading-k singular value decomposition.
//!
//! The fast path eigendecomposes the Gram matrix of the smaller side and
//! recovers the other side by one multiply. When the Gram spectrum is
//! ill-conditioned (`λ_1 / λ_k > 1e8`) or the recovered vectors lose
//! orthonormality, a one-sided Jacobi SVD of the whole matrix is used
//! instead; it stays accurate on rank-deficient input.

use nalgebra::SymmetricEigen;

use crate::error::{invalid, Result, TensorError};
use crate::matrix::Matrix;

const GRAM_CONDITION_LIMIT: f64 = 1e8;
const ORTHONORMALITY_TOL: f64 = 1e-11;
const EIGEN_MAX_ITERS: usize = 10_000;
const JACOBI_MAX_SWEEPS: usize = 80;
const JACOBI_TOL: f64 = 1e-15;

/// `m ≈ u · diag(s) · vᵀ` with `s` non-increasing.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `rows × k`, orthonormal columns.
    pub u: Matrix,
    pub s: Vec<f64>,
    /// `cols × k`, orthonormal columns.
    pub v: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        us.scale_columns(&self.s);
        us.matmul_t(&self.v).expect("conforming factors")
    }

    fn truncate(self, k: usize) -> Svd {
        Svd { u: self.u.leading_columns(k), s: self.s[..k].to_vec(), v: self.v.leading_columns(k) }
    }
}

/// Leading `k` singular triplets of `m`. The largest-magnitude entry of every
/// left singular vector is made positive.
pub fn partial_svd(m: &Matrix, k: usize) -> Result<Svd> {
    let max_k = m.rows().min(m.cols());
    if k == 0 || k > max_k {
        return Err(invalid!("requested {k} singular values of a {}x{} matrix", m.rows(), m.cols()));
    }
    check_finite(m)?;
    let eig = GramEigen::new(m)?;
    let mut svd = match eig.leading_svd(m, k)? {
        Some(svd) => svd,
        None => jacobi_svd(m)?.truncate(k),
    };
    fix_signs(&mut svd);
    Ok(svd)
}

/// `k` orthonormal columns spanning the leading left singular subspace of
/// `m`. When `k` exceeds the column count the remaining columns complete an
/// orthonormal basis arbitrarily.
pub(crate) fn leading_left_vectors(m: &Matrix, k: usize) -> Result<Matrix> {
    let available = m.rows().min(m.cols());
    if k <= available {
        return Ok(partial_svd(m, k)?.u);
    }
    if k > m.rows() {
        return Err(invalid!("requested {k} left singular vectors of a {}x{} matrix", m.rows(), m.cols()));
    }
    let lead = partial_svd(m, available)?.u;
    let mut cols: Vec<Vec<f64>> = (0..k).map(|c| if c < available { lead.column(c) } else { vec![0.0; m.rows()] }).collect();
    complete_basis(&mut cols, &(available..k).collect::<Vec<_>>());
    Ok(Matrix::from_fn(m.rows(), k, |i, c| cols[c][i]))
}

/// Singular triplets with `σ > tau`, or `None` if there are none.
pub(crate) fn svd_above(m: &Matrix, tau: f64) -> Result<Option<Svd>> {
    check_finite(m)?;
    let eig = GramEigen::new(m)?;
    let kept = eig.values.iter().filter(|&&l| l.max(0.0).sqrt() > tau).count();
    if kept == 0 {
        return Ok(None);
    }
    let mut svd = match eig.leading_svd(m, kept)? {
        Some(svd) => svd,
        None => {
            let full = jacobi_svd(m)?;
            let kept = full.s.iter().filter(|&&s| s > tau).count();
            if kept == 0 {
                return Ok(None);
            }
            full.truncate(kept)
        }
    };
    fix_signs(&mut svd);
    Ok(Some(svd))
}

fn check_finite(m: &Matrix) -> Result<()> {
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(TensorError::Numeric("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Eigendecomposition of `m mᵀ` (wide input) or `mᵀ m` (tall input), sorted descending.
struct GramEigen {
    wide: bool,
    values: Vec<f64>,
    vectors: Matrix,
}

impl GramEigen {
    fn new(m: &Matrix) -> Result<Self> {
        let wide = m.rows() <= m.cols();
        let gram = if wide { m.matmul_t(m)? } else { m.gram() };
        let eig = SymmetricEigen::try_new(gram.to_nalgebra(), f64::EPSILON, EIGEN_MAX_ITERS).ok_or_else(|| {
            TensorError::Numeric(format!("Gram eigensolver did not converge on {}x{} input", m.rows(), m.cols()))
        })?;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let p = gram.rows();
        Ok(Self {
            wide,
            values: order.iter().map(|&j| eig.eigenvalues[j]).collect(),
            vectors: Matrix::from_fn(p, p, |i, c| eig.eigenvectors[(i, order[c])]),
        })
    }

    /// `None` when the leading-`k` block is too ill-conditioned for this route.
    fn leading_svd(&self, m: &Matrix, k: usize) -> Result<Option<Svd>> {
        let (lmax, lk) = (self.values[0], self.values[k - 1]);
        if !(lk > 0.0) || lmax / lk > GRAM_CONDITION_LIMIT {
            return Ok(None);
        }
        let s: Vec<f64> = self.values[..k].iter().map(|l| l.sqrt()).collect();
        let basis = self.vectors.leading_columns(k);
        // Other side: mᵀu / s (wide) or m v / s (tall).
        let mut other = if self.wide { m.tmatmul(&basis)? } else { m.matmul(&basis)? };
        other.scale_columns(&s.iter().map(|x| 1.0 / x).collect::<Vec<_>>());
        if other.gram().sub(&Matrix::identity(k))?.max_abs() > ORTHONORMALITY_TOL {
            return Ok(None);
        }
        Ok(Some(if self.wide { Svd { u: basis, s, v: other } } else { Svd { u: other, s, v: basis } }))
    }
}

/// Full thin SVD by one-sided (Hestenes) Jacobi rotations.
fn jacobi_svd(m: &Matrix) -> Result<Svd> {
    if m.rows() < m.cols() {
        let t = jacobi_svd(&m.transpose())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let (rows, n) = m.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(TensorError::Numeric(format!(
            "Jacobi SVD of {rows}x{n} input did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let norms: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if norms[j] > 0.0 {
            u_cols.push(cols[j].iter().map(|x| x / norms[j]).collect());
        } else {
            u_cols.push(vec![0.0; rows]);
            missing.push(slot);
        }
    }
    complete_basis(&mut u_cols, &missing);

    Ok(Svd {
        u: Matrix::from_fn(rows, n, |i, c| u_cols[c][i]),
        s: order.iter().map(|&j| norms[j]).collect(),
        v: Matrix::from_fn(n, n, |i, c| v[order[c]][i]),
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Replaces the listed zero columns with unit vectors orthogonal to the rest.
fn complete_basis(cols: &mut [Vec<f64>], missing: &[usize]) {
    let rows = cols.first().map_or(0, Vec::len);
    let mut axis = 0;
    for &slot in missing {
        while axis < rows {
            let mut w = vec![0.0; rows];
            w[axis] = 1.0;
            axis += 1;
            // Two Gram-Schmidt passes; unfilled columns are still zero and drop out.
            for _ in 0..2 {
                for c in cols.iter() {
                    let proj = dot(&w, c);
                    w.iter_mut().zip(c).for_each(|(a, b)| *a -= proj * b);
                }
            }
            let norm = dot(&w, &w).sqrt();
            if norm > 0.5 {
                cols[slot] = w.into_iter().map(|x| x / norm).collect();
                break;
            }
        }
    }
}

fn fix_signs(svd: &mut Svd) {
    for c in 0..svd.s.len() {
        let col = svd.u.column(c);
        let pivot = col.iter().fold(0.0f64, |best, &v| if v.abs() > best.abs() { v } else { best });
        if pivot < 0.0 {
            for i in 0..svd.u.rows() {
                svd.u[(i, c)] = -svd.u[(i, c)];
            }
            for i in 0..svd.v.rows() {
                svd.v[(i, c)] = -svd.v[(i, c)];
            }
        }
    }
}

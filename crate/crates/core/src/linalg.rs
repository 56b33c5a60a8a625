//! Small symmetric solvers shared by the ALS-style updates.

use nalgebra::{Cholesky, SymmetricEigen};

use crate::error::{mismatch, Result, TensorError};
use crate::matrix::Matrix;

/// Relative eigenvalue cutoff below which directions are treated as null.
pub(crate) const PINV_CUTOFF: f64 = 1e-12;

/// Pseudo-inverse of a symmetric positive semidefinite matrix.
///
/// Eigenvalues below `PINV_CUTOFF · λ_max` are dropped. If the eigensolver
/// fails, falls back to `(H + ρI)^{-1}` with `ρ = 1e-12 · trace(H) / n`.
pub(crate) fn sym_pinv(h: &Matrix) -> Result<Matrix> {
    let n = h.rows();
    if n != h.cols() {
        return Err(mismatch!("pseudo-inverse of non-square {}x{} matrix", n, h.cols()));
    }
    if h.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(TensorError::Numeric("non-finite entries in normal equations".into()));
    }
    let sym = symmetrized(h);
    match SymmetricEigen::try_new(sym.clone(), f64::EPSILON, 10_000) {
        Some(eig) if eig.eigenvalues.iter().all(|v| v.is_finite()) => {
            let lmax = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v));
            let cutoff = PINV_CUTOFF * lmax;
            let q = &eig.eigenvectors;
            let mut out = Matrix::zeros(n, n);
            for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda <= cutoff || lambda <= 0.0 {
                    continue;
                }
                let inv = 1.0 / lambda;
                for a in 0..n {
                    let qa = q[(a, j)] * inv;
                    for b in 0..n {
                        out[(a, b)] += qa * q[(b, j)];
                    }
                }
            }
            Ok(out)
        }
        _ => ridge_inverse(&sym),
    }
}

fn ridge_inverse(sym: &nalgebra::DMatrix<f64>) -> Result<Matrix> {
    let n = sym.nrows();
    let ridge = (PINV_CUTOFF * sym.trace() / n as f64).max(f64::MIN_POSITIVE);
    let shifted = sym + nalgebra::DMatrix::identity(n, n) * ridge;
    let chol = Cholesky::new(shifted)
        .ok_or_else(|| TensorError::Numeric("ridge-regularized normal equations are not positive definite".into()))?;
    Ok(Matrix::from_nalgebra(&chol.inverse()))
}

fn symmetrized(h: &Matrix) -> nalgebra::DMatrix<f64> {
    let m = h.to_nalgebra();
    (&m + m.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_well_conditioned_matrix() {
        let h = Matrix::from_rows(&[[4.0, 1.0], [1.0, 3.0]]);
        let inv = sym_pinv(&h).unwrap();
        let eye = h.matmul(&inv).unwrap();
        assert!(eye.sub(&Matrix::identity(2)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn pseudo_inverse_of_singular_and_zero() {
        // rank one: [1 1; 1 1] has pinv [1 1; 1 1] / 4
        let h = Matrix::filled(2, 2, 1.0);
        let inv = sym_pinv(&h).unwrap();
        assert!(inv.sub(&Matrix::filled(2, 2, 0.25)).unwrap().max_abs() < 1e-14);
        assert_eq!(sym_pinv(&Matrix::zeros(3, 3)).unwrap(), Matrix::zeros(3, 3));
        assert!(sym_pinv(&Matrix::filled(2, 2, f64::NAN)).is_err());
    }
}

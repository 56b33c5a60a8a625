//! n-mode products, Kronecker / Khatri-Rao / Hadamard products and an
//! empirical third-order moment.
//!
//! Run with `cargo run --example products`.

use tensorkit::algebra::{hadamard, khatri_rao, kronecker, mode_dot_matrix, mode_dot_vector, moment3, outer};
use tensorkit::{DenseTensor, Matrix};

fn main() -> tensorkit::Result<()> {
    let x = DenseTensor::random_gaussian(&[3, 4, 5], 7)?;

    // X ×_1 U: the mode-1 unfolding of the product is U · X_(1).
    let u = Matrix::from_fn(2, 4, |i, j| (i + j) as f64 / 4.0);
    let y = mode_dot_matrix(&x, &u, 1)?;
    let lhs = y.unfold(1)?;
    let rhs = u.matmul(&x.unfold(1)?)?;
    println!("X ×_1 U has shape {:?}; identity residual {:.2e}", y.shape(), lhs.sub(&rhs)?.max_abs());

    let contracted = mode_dot_vector(&x, &[1.0, 0.0, 0.0, 0.0], 1)?;
    println!("X ×_1 e_0 has shape {:?}", contracted.shape());

    let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
    let b = Matrix::from_rows(&[[0.0, 5.0], [6.0, 7.0]]);
    println!("kron(A, B) is {:?}", kronecker(&a, &b).shape());
    println!("khatri_rao(A, B) row 1: {:?}", khatri_rao(&[&a, &b])?.row(1));
    println!("hadamard(A, B): {:?}", hadamard(&[&a, &b])?.as_slice());

    // (A ⊙ B)ᵀ(A ⊙ B) = AᵀA ∗ BᵀB
    let kr = khatri_rao(&[&a, &b])?;
    let gram_identity = kr.gram().sub(&hadamard(&[&a.gram(), &b.gram()])?)?.max_abs();
    println!("Khatri-Rao Gram identity residual {gram_identity:.2e}");

    let rank_one = outer(&[&[1.0, 2.0], &[1.0, -1.0, 0.5]])?;
    println!("outer product shape {:?}: {:?}", rank_one.shape(), rank_one.as_slice());

    let samples: Vec<Vec<f64>> = (0..500)
        .map(|s| DenseTensor::random_gaussian(&[3], s).map(DenseTensor::into_vec))
        .collect::<tensorkit::Result<_>>()?;
    let m3 = moment3(&samples)?;
    println!("E[x ⊗ x ⊗ x] for Gaussian x: largest |entry| {:.3}", m3.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs())));
    Ok(())
}

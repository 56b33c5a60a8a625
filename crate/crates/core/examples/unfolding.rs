//! Mode-n unfolding, folding and vectorization of a small cube.
//!
//! Run with `cargo run --example unfolding`.

use tensorkit::{DenseTensor, Matrix};

fn print_matrix(name: &str, m: &Matrix) {
    println!("{name} ({}x{}):", m.rows(), m.cols());
    for i in 0..m.rows() {
        println!("  {:?}", m.row(i));
    }
}

fn main() -> tensorkit::Result<()> {
    // X(i, j, k) = 4i + 2j + k
    let x = DenseTensor::from_fn(&[2, 2, 2], |idx| (4 * idx[0] + 2 * idx[1] + idx[2]) as f64)?;
    println!("vec(X) = {:?}", x.vectorize());

    for mode in 0..x.order() {
        let m = x.unfold(mode)?;
        print_matrix(&format!("X_({mode})"), &m);
        let back = DenseTensor::fold(&m, mode, x.shape())?;
        assert_eq!(back, x);
    }

    // Column j of the mode-1 unfolding enumerates (i, k) in row-major order.
    let m1 = x.unfold(1)?;
    for (j, (i, k)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        assert_eq!(m1[(1, j)], x.get(&[i, 1, k]));
    }

    println!("‖X‖_F = {} (sqrt(140) = {})", x.frobenius_norm(), 140f64.sqrt());
    Ok(())
}

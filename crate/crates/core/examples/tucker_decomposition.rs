//! HOSVD and HOOI on data of exact multilinear rank (2, 2, 2), then on noisy data.
//!
//! Run with `cargo run --release --example tucker_decomposition`.

use tensorkit::decomposition::{tucker_hooi, tucker_hosvd};
use tensorkit::{DenseTensor, FitOptions, TuckerTensor};

fn main() -> tensorkit::Result<()> {
    let x = TuckerTensor::random(&[30, 30, 30], &[2, 2, 2], 4)?.to_tensor()?;

    let hosvd = tucker_hosvd(&x, &[2, 2, 2])?;
    println!("HOSVD relative error {:.3e}", x.relative_error(&hosvd.to_tensor()?)?);

    // 5% relative Gaussian noise.
    let noise = DenseTensor::random_gaussian(x.shape(), 5)?;
    let noisy = x.add(&noise.scaled(0.05 * x.frobenius_norm() / noise.frobenius_norm()))?;
    let (model, report) = tucker_hooi(&noisy, &FitOptions::tucker(&[2, 2, 2]))?;
    println!(
        "HOOI on noisy data: core {:?}, {} sweeps, trace {:?}",
        model.core().shape(),
        report.iterations_run,
        report.objective_trace
    );
    println!("distance to the clean tensor {:.3e}", x.relative_error(&model.to_tensor()?)?);
    Ok(())
}

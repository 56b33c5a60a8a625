//! Non-negative CP and Tucker by multiplicative updates.
//!
//! Run with `cargo run --release --example nonnegative`.

use tensorkit::decomposition::{nn_cp_mu, nn_tucker_mu};
use tensorkit::{FitOptions, KruskalTensor, Matrix};

fn main() -> tensorkit::Result<()> {
    let (weights, factors) = KruskalTensor::random(&[15, 12, 10], 3, 8)?.into_parts();
    let planted = KruskalTensor::new(weights.iter().map(|w| w.abs()).collect(), factors.iter().map(|f| f.map(f64::abs)).collect())?;
    let x = planted.to_tensor()?;

    let (cp, report) = nn_cp_mu(&x, &FitOptions::cp(3).with_max_iters(500).with_seed(2))?;
    let min_entry = cp.factors().iter().flat_map(Matrix::as_slice).fold(f64::INFINITY, |m, &v| m.min(v));
    println!(
        "NN-CP: {} sweeps, relative error {:.3e}, smallest factor entry {min_entry:.2e}",
        report.iterations_run,
        report.final_objective().unwrap_or(f64::NAN)
    );

    let (tucker, report) = nn_tucker_mu(&x, &FitOptions::tucker(&[3, 3, 3]).with_max_iters(500).with_seed(2))?;
    println!(
        "NN-Tucker: {} sweeps, relative error {:.3e}, core min {:.2e}",
        report.iterations_run,
        report.final_objective().unwrap_or(f64::NAN),
        tucker.core().as_slice().iter().fold(f64::INFINITY, |m, &v| m.min(v))
    );
    Ok(())
}

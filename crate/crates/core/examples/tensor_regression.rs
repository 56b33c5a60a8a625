//! Low-rank tensor regression with Kruskal and Tucker weights.
//!
//! Run with `cargo run --release --example tensor_regression`.

use tensorkit::algebra::outer;
use tensorkit::regression::{kruskal_ridge_fit, tucker_ridge_fit, RegressionOptions};
use tensorkit::DenseTensor;

fn main() -> tensorkit::Result<()> {
    let weight = outer(&[&[1.0, -0.5, 0.3, 2.0], &[0.4, 1.0, -1.2, 0.7]])?;
    let covariates: Vec<DenseTensor> =
        (0..200).map(|s| DenseTensor::random_gaussian(&[4, 4], 100 + s)).collect::<tensorkit::Result<_>>()?;
    let responses: Vec<f64> =
        covariates.iter().map(|x| weight.inner(x).map(|v| v + 3.0)).collect::<tensorkit::Result<_>>()?;

    let opts = RegressionOptions::default().with_seed(1);
    let kruskal = kruskal_ridge_fit(&covariates, &responses, 1, 0.0, &opts)?;
    println!(
        "Kruskal rank 1: weight error {:.2e}, bias {:.6}, {} sweeps",
        weight.relative_error(&kruskal.weight.to_tensor()?)?,
        kruskal.bias,
        kruskal.fit_report.iterations_run
    );

    let tucker = tucker_ridge_fit(&covariates, &responses, &[2, 2], 1e-3, &opts)?;
    println!(
        "Tucker (2, 2), reg 1e-3: weight error {:.2e}, final objective {:.3e}",
        weight.relative_error(&tucker.weight.to_tensor()?)?,
        tucker.fit_report.final_objective().unwrap_or(f64::NAN)
    );

    let fresh = DenseTensor::random_gaussian(&[4, 4], 9_999)?;
    println!("prediction {:.6} vs truth {:.6}", kruskal.predict(&[fresh.clone()])?[0], weight.inner(&fresh)? + 3.0);
    Ok(())
}

//! CP decomposition by alternating least squares on a planted low-rank tensor.
//!
//! Run with `cargo run --release --example cp_decomposition`.

use tensorkit::decomposition::{cp_als, Init};
use tensorkit::{FitOptions, KruskalTensor};

fn main() -> tensorkit::Result<()> {
    let truth = KruskalTensor::random(&[20, 20, 20], 5, 11)?;
    let x = truth.to_tensor()?;

    for init in [Init::Svd, Init::Random] {
        let opts = FitOptions::cp(5).with_max_iters(200).with_init(init).with_seed(1);
        let (model, report) = cp_als(&x, &opts)?;
        let err = x.relative_error(&model.to_tensor()?)?;
        println!(
            "{init:?} init: {} sweeps, converged = {}, relative error {err:.3e}",
            report.iterations_run, report.converged
        );
        println!("  weights {:?}", model.weights().iter().map(|w| (w * 1e3).round() / 1e3).collect::<Vec<_>>());
    }
    Ok(())
}

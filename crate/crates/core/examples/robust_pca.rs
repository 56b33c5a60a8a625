//! Robust tensor PCA: separate a low multilinear-rank tensor from sparse
//! gross corruption.
//!
//! Run with `cargo run --release --example robust_pca`.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tensorkit::rpca::{robust_tpca, RpcaOptions};
use tensorkit::{DenseTensor, TuckerTensor};

fn main() -> tensorkit::Result<()> {
    let shape = [30, 30, 30];
    let clean = TuckerTensor::random(&shape, &[2, 2, 2], 1)?.to_tensor()?;

    // 5% of the entries get ±10.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut corruption = DenseTensor::zeros(&shape)?;
    let hits = sample(&mut rng, clean.len(), clean.len() / 20);
    for (n, flat) in hits.iter().enumerate() {
        corruption.as_mut_slice()[flat] = if n % 2 == 0 { 10.0 } else { -10.0 };
    }
    let observed = clean.add(&corruption)?;

    let result = robust_tpca(&observed, &RpcaOptions::default())?;
    let support: Vec<usize> = (0..observed.len()).filter(|&i| result.sparse.as_slice()[i].abs() > 1e-6).collect();
    let true_hits = support.iter().filter(|&&i| corruption.as_slice()[i] != 0.0).count();
    let feasibility = observed.sub(&result.low_rank)?.sub(&result.sparse)?.frobenius_norm() / observed.frobenius_norm();

    println!("iterations {} (converged = {})", result.iterations_run, result.converged);
    println!("low-rank relative error {:.3e}", clean.relative_error(&result.low_rank)?);
    println!("sparse support precision {}/{}", true_hits, support.len());
    println!("feasibility ‖X − L − S‖/‖X‖ = {feasibility:.2e}");
    Ok(())
}

//! Randomized invariants across the public API.

use proptest::prelude::*;
use tensorkit::algebra::{hadamard, khatri_rao, mode_dot_matrix, moment3, multi_mode_dot};
use tensorkit::decomposition::{cp_als, partial_svd, tucker_hooi, Init};
use tensorkit::regression::{kruskal_ridge_fit, RegressionOptions};
use tensorkit::rpca::{robust_tpca, soft_threshold, svd_threshold, RpcaOptions};
use tensorkit::{io, DenseTensor, FitOptions, KruskalTensor, Matrix, TuckerTensor};

fn shape(max_order: usize, max_dim: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=max_dim, 1..=max_order)
}

fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let t = DenseTensor::random_gaussian(&[rows, cols], seed).unwrap();
    Matrix::new(rows, cols, t.into_vec()).unwrap()
}

fn rel(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_matches_vectorized_dot(shape in shape(4, 5), seed in any::<u64>()) {
        let x = DenseTensor::random_gaussian(&shape, seed).unwrap();
        let v = x.vectorize();
        let dot: f64 = v.iter().map(|a| a * a).sum();
        prop_assert!((x.frobenius_norm().powi(2) - dot).abs() <= 1e-12 * dot.max(1.0));
    }

    #[test]
    fn mode_dot_defining_identity(shape in shape(4, 5), rows in 1usize..5, pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let x = DenseTensor::random_gaussian(&shape, seed).unwrap();
        let n = pick.index(shape.len());
        let u = gaussian_matrix(rows, shape[n], seed ^ 1);
        let y = mode_dot_matrix(&x, &u, n).unwrap();
        prop_assert_eq!(y.shape()[n], rows);
        prop_assert!(rel(&y.unfold(n).unwrap(), &u.matmul(&x.unfold(n).unwrap()).unwrap()) <= 1e-12);
    }

    #[test]
    fn distinct_mode_products_commute(shape in prop::collection::vec(1usize..=5, 2..=4), seed in any::<u64>()) {
        let x = DenseTensor::random_gaussian(&shape, seed).unwrap();
        let a = gaussian_matrix(3, shape[0], seed ^ 2);
        let b = gaussian_matrix(2, shape[1], seed ^ 3);
        let ab = mode_dot_matrix(&mode_dot_matrix(&x, &a, 0).unwrap(), &b, 1).unwrap();
        let ba = mode_dot_matrix(&mode_dot_matrix(&x, &b, 1).unwrap(), &a, 0).unwrap();
        let both = multi_mode_dot(&x, &[(&b, 1), (&a, 0)], false).unwrap();
        prop_assert!(ab.max_abs_diff(&ba).unwrap() <= 1e-10 * ab.frobenius_norm().max(1.0));
        prop_assert!(ab.max_abs_diff(&both).unwrap() <= 1e-10 * ab.frobenius_norm().max(1.0));
    }

    #[test]
    fn khatri_rao_gram_identity(rows in prop::collection::vec(1usize..=5, 1..=4), rank in 1usize..=4, seed in any::<u64>()) {
        let mats: Vec<Matrix> = rows.iter().enumerate().map(|(i, &r)| gaussian_matrix(r, rank, seed ^ i as u64)).collect();
        let refs: Vec<&Matrix> = mats.iter().collect();
        let grams: Vec<Matrix> = mats.iter().map(Matrix::gram).collect();
        let gram_refs: Vec<&Matrix> = grams.iter().collect();
        prop_assert!(rel(&khatri_rao(&refs).unwrap().gram(), &hadamard(&gram_refs).unwrap()) <= 1e-10);
    }

    #[test]
    fn moment3_is_symmetric(d in 1usize..=5, m in 1usize..=6, seed in any::<u64>()) {
        let samples: Vec<Vec<f64>> = (0..m).map(|i| DenseTensor::random_gaussian(&[d], seed ^ i as u64).unwrap().into_vec()).collect();
        let t = moment3(&samples).unwrap();
        for i in 0..d { for j in 0..d { for k in 0..d {
            let v = t.get(&[i, j, k]);
            for p in [[i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
                prop_assert_eq!(v.to_bits(), t.get(&p).to_bits());
            }
        }}}
    }

    #[test]
    fn kruskal_unfolding_identity(shape in prop::collection::vec(1usize..=5, 2..=4), rank in 1usize..=3, seed in any::<u64>()) {
        let (_, factors) = KruskalTensor::random(&shape, rank, seed).unwrap().into_parts();
        let weights: Vec<f64> = (0..rank).map(|r| 0.5 + r as f64).collect();
        let kt = KruskalTensor::new(weights.clone(), factors.clone()).unwrap();
        let full = kt.to_tensor().unwrap();
        for n in 0..shape.len() {
            let others: Vec<&Matrix> = (0..shape.len()).filter(|&k| k != n).map(|k| &factors[k]).collect();
            let mut left = factors[n].clone();
            left.scale_columns(&weights);
            let expected = left.matmul_t(&khatri_rao(&others).unwrap()).unwrap();
            prop_assert!(rel(&full.unfold(n).unwrap(), &expected) <= 1e-10);
        }
        let normalized = kt.normalize().unwrap().to_tensor().unwrap();
        prop_assert!(normalized.max_abs_diff(&full).unwrap() <= 1e-12 * full.frobenius_norm().max(1.0));
    }

    #[test]
    fn orthonormal_tucker_preserves_core_norm(dims in prop::collection::vec(2usize..=6, 3), seed in any::<u64>()) {
        let ranks: Vec<usize> = dims.iter().map(|d| d / 2).collect();
        let core = DenseTensor::random_gaussian(&ranks, seed).unwrap();
        let factors: Vec<Matrix> = dims.iter().zip(&ranks).enumerate()
            .map(|(i, (&d, &r))| partial_svd(&gaussian_matrix(d, d, seed ^ i as u64), r).unwrap().u)
            .collect();
        let x = TuckerTensor::new(core.clone(), factors).unwrap().to_tensor().unwrap();
        prop_assert!((x.frobenius_norm() - core.frobenius_norm()).abs() <= 1e-10 * core.frobenius_norm().max(1.0));
    }

    #[test]
    fn partial_svd_orthonormal(rows in 1usize..=12, cols in 1usize..=12, rank in 1usize..=12, seed in any::<u64>()) {
        let r = rank.min(rows).min(cols);
        let m = gaussian_matrix(rows, r, seed).matmul(&gaussian_matrix(r, cols, seed ^ 9)).unwrap();
        let k = rows.min(cols);
        let svd = partial_svd(&m, k).unwrap();
        prop_assert!(svd.u.gram().sub(&Matrix::identity(k)).unwrap().max_abs() < 1e-10);
        prop_assert!(svd.v.gram().sub(&Matrix::identity(k)).unwrap().max_abs() < 1e-10);
        prop_assert!(svd.s.windows(2).all(|w| w[0] >= w[1]) && svd.s.iter().all(|&s| s >= 0.0));
        prop_assert!(m.sub(&svd.reconstruct()).unwrap().max_abs() <= 1e-10 * m.max_abs().max(1.0));
    }

    #[test]
    fn soft_threshold_contracts(len in 1usize..40, tau in 0.0f64..3.0, seed in any::<u64>()) {
        let a = DenseTensor::random_gaussian(&[len], seed).unwrap().scaled(3.0);
        let b = DenseTensor::random_gaussian(&[len], seed ^ 5).unwrap().scaled(3.0);
        let pa = soft_threshold(&a, tau).unwrap();
        let pb = soft_threshold(&b, tau).unwrap();
        prop_assert!(pa.sub(&pb).unwrap().frobenius_norm() <= a.sub(&b).unwrap().frobenius_norm() + 1e-15);
    }

    #[test]
    fn svd_threshold_rank_bound(rows in 1usize..=10, cols in 1usize..=10, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let m = gaussian_matrix(rows, cols, seed);
        let k = rows.min(cols);
        let s = partial_svd(&m, k).unwrap().s;
        let tau = frac * s[0];
        let kept = s.iter().filter(|&&v| v > tau).count();
        let out = svd_threshold(&m, tau).unwrap();
        let numerical_rank = partial_svd(&out, k).unwrap().s.iter().filter(|&&v| v > 1e-10).count();
        prop_assert!(numerical_rank <= kept);
    }

    #[test]
    fn tnsr_roundtrip(shape in shape(5, 4), seed in any::<u64>()) {
        let x = DenseTensor::random_gaussian(&shape, seed).unwrap();
        let mut buf = Vec::new();
        io::write_tensor(&x, &mut buf).unwrap();
        let back = io::read_tensor(buf.as_slice()).unwrap();
        prop_assert_eq!(back.shape(), x.shape());
        prop_assert!(back.as_slice().iter().zip(x.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fits_are_deterministic(dims in prop::collection::vec(2usize..=6, 3), seed in any::<u64>()) {
        let x = DenseTensor::random_gaussian(&dims, seed).unwrap();
        let opts = FitOptions::cp(2).with_init(Init::Random).with_seed(seed).with_max_iters(10);
        prop_assert_eq!(cp_als(&x, &opts).unwrap(), cp_als(&x, &opts).unwrap());
        let opts = FitOptions::tucker(&[1, 2, 1]).with_max_iters(5);
        prop_assert_eq!(tucker_hooi(&x, &opts).unwrap(), tucker_hooi(&x, &opts).unwrap());
    }

    #[test]
    fn predict_is_affine(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let xs: Vec<DenseTensor> = (0..12).map(|i| DenseTensor::random_gaussian(&[3, 2], seed ^ i).unwrap()).collect();
        let y: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let model = kruskal_ridge_fit(&xs, &y, 1, 0.1, &RegressionOptions::default().with_max_iters(5)).unwrap();
        let mix = xs[0].scaled(a).add(&xs[1].scaled(b)).unwrap();
        let p = model.predict(&[xs[0].clone(), xs[1].clone(), mix]).unwrap();
        let expected = a * p[0] + b * p[1] - (a + b - 1.0) * model.bias;
        prop_assert!((p[2] - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
    }

    #[test]
    fn rpca_settles_and_is_idempotent(seed in any::<u64>(), spikes in 0usize..200) {
        let clean = TuckerTensor::random(&[16, 15, 14], &[2, 2, 2], seed).unwrap().to_tensor().unwrap().scaled(5.0);
        let mut x = clean.clone();
        for k in 0..spikes {
            let i = (seed.wrapping_mul(31).wrapping_add(k as u64 * 97) % x.len() as u64) as usize;
            x.as_mut_slice()[i] += if k % 2 == 0 { 10.0 } else { -10.0 };
        }
        let opts = RpcaOptions::default().with_max_iters(1000);
        let r = robust_tpca(&x, &opts).unwrap();
        for w in r.residual_trace.windows(2).skip(10) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-15, "{} -> {}", w[0], w[1]);
        }
        if r.converged {
            let fit = r.low_rank.add(&r.sparse).unwrap();
            prop_assert!(x.sub(&fit).unwrap().frobenius_norm() / x.frobenius_norm() <= opts.tol);
            let again = robust_tpca(&fit, &opts).unwrap();
            let scale = x.frobenius_norm();
            prop_assert!(again.low_rank.sub(&r.low_rank).unwrap().frobenius_norm() / scale <= 10.0 * opts.tol);
            prop_assert!(again.sparse.sub(&r.sparse).unwrap().frobenius_norm() / scale <= 10.0 * opts.tol);
        }
    }
}

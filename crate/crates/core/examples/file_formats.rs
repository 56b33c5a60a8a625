//! Saving and loading tensors (TNSR), factorized models and regression datasets.
//!
//! Run with `cargo run --example file_formats [DIR]`; files go to a fresh
//! directory under the system temp dir unless DIR is given.

use std::path::PathBuf;

use tensorkit::io::{self, RegressionDataset};
use tensorkit::{DenseTensor, KruskalTensor, TuckerTensor};

fn main() -> tensorkit::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join(format!("tensorkit-formats-{}", std::process::id())));
    std::fs::create_dir_all(&root)?;

    let x = DenseTensor::random_gaussian(&[3, 4, 5], 1)?;
    let path = root.join("x.tnsr");
    io::save_tensor(&x, &path)?;
    assert_eq!(io::load_tensor(&path)?, x);
    println!("{}: {} bytes", path.display(), std::fs::metadata(&path)?.len());

    let cp = KruskalTensor::random(&[3, 4, 5], 2, 2)?;
    io::save_kruskal(&cp, root.join("cp_model"))?;
    assert_eq!(io::load_kruskal(root.join("cp_model"))?, cp);

    let tucker = TuckerTensor::random(&[3, 4, 5], &[2, 2, 2], 3)?;
    io::save_tucker(&tucker, root.join("tucker_model"))?;
    println!("{}", std::fs::read_to_string(root.join("tucker_model").join(io::MANIFEST))?);

    let data = RegressionDataset {
        covariates: (0..4).map(|s| DenseTensor::random_gaussian(&[2, 2], s)).collect::<tensorkit::Result<_>>()?,
        responses: vec![0.5, 1.5, -2.0, 0.25],
    };
    io::save_regression_dataset(&data, root.join("y.txt"), root.join("covariates"))?;
    let back = io::load_regression_dataset(root.join("y.txt"), root.join("covariates"))?;
    assert_eq!(back, data);
    println!("regression dataset with {} samples written under {}", back.responses.len(), root.display());
    Ok(())
}

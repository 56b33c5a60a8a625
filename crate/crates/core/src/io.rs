//! File formats.
//!
//! A single tensor is stored as a TNSR file:
//!
//! ```text
//! b"TNSR" | version: u8 = 1 | order N: u8 | N × u64 LE dims | Π dims × f64 LE values (row-major)
//! ```
//!
//! Factorized tensors live in a directory holding one TNSR file per factor
//! (and the core, for Tucker) next to a `manifest.json` that records the kind,
//! shape, rank(s), weights and file names. Regression datasets are a text
//! file of responses (one per line) plus a directory of TNSR covariates whose
//! `manifest.json` lists the files in sample order.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Result, TensorError};
use crate::kruskal::KruskalTensor;
use crate::matrix::Matrix;
use crate::regression::Weight;
use crate::tensor::DenseTensor;
use crate::tucker::TuckerTensor;

pub const MAGIC: &[u8; 4] = b"TNSR";
pub const VERSION: u8 = 1;
pub const MANIFEST: &str = "manifest.json";

/// Serializes `x` into any writer.
pub fn write_tensor(x: &DenseTensor, mut out: impl Write) -> Result<()> {
    let order = u8::try_from(x.order())
        .map_err(|_| TensorError::Format(format!("order {} does not fit the header", x.order())))?;
    let mut buf = Vec::with_capacity(6 + 8 * x.order() + 8 * x.len());
    buf.extend_from_slice(MAGIC);
    buf.push(VERSION);
    buf.push(order);
    for &d in x.shape() {
        buf.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for v in x.as_slice() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Parses a complete TNSR byte stream.
pub fn read_tensor(mut input: impl Read) -> Result<DenseTensor> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode(&bytes)
}

fn decode(bytes: &[u8]) -> Result<DenseTensor> {
    let head = &bytes[..bytes.len().min(4)];
    if head != &MAGIC[..head.len()] {
        return Err(TensorError::Format(format!("bad magic {head:?}, expected TNSR")));
    }
    if bytes.len() < 6 {
        return Err(TensorError::Corrupt(format!("header truncated at {} bytes", bytes.len())));
    }
    if bytes[4] != VERSION {
        return Err(TensorError::Format(format!("unsupported version {}, expected {VERSION}", bytes[4])));
    }
    let order = bytes[5] as usize;
    let dims_end = 6 + 8 * order;
    if bytes.len() < dims_end {
        return Err(TensorError::Corrupt(format!("dimension block truncated: {} of {dims_end} bytes", bytes.len())));
    }
    let shape: Vec<usize> = bytes[6..dims_end]
        .chunks_exact(8)
        .map(|c| usize::try_from(u64::from_le_bytes(c.try_into().expect("8-byte chunk"))))
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| TensorError::Corrupt("dimension exceeds addressable size".into()))?;
    if shape.contains(&0) {
        return Err(TensorError::Corrupt(format!("zero-sized dimension in {shape:?}")));
    }
    let count = shape
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| TensorError::Corrupt(format!("shape {shape:?} overflows")))?;
    let payload = &bytes[dims_end..];
    if payload.len() != count {
        return Err(TensorError::Corrupt(format!(
            "shape {shape:?} declares {count} payload bytes but {} are present",
            payload.len()
        )));
    }
    let values: Vec<f64> =
        payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect();
    if order == 0 {
        return Ok(DenseTensor::scalar(values[0]));
    }
    DenseTensor::new(shape, values)
}

pub fn save_tensor(x: &DenseTensor, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_tensor(x, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    decode(&fs::read(path)?)
}

fn save_matrix(m: &Matrix, path: &Path) -> Result<()> {
    save_tensor(&DenseTensor::new(vec![m.rows(), m.cols()], m.as_slice().to_vec())?, path)
}

fn load_matrix(path: &Path, rows: usize, cols: usize) -> Result<Matrix> {
    let t = load_tensor(path)?;
    if t.shape() != [rows, cols] {
        return Err(TensorError::Corrupt(format!(
            "{} holds shape {:?}, manifest implies [{rows}, {cols}]",
            path.display(),
            t.shape()
        )));
    }
    Matrix::new(rows, cols, t.into_vec())
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ModelManifest {
    Kruskal { shape: Vec<usize>, rank: usize, weights: Vec<f64>, factors: Vec<String> },
    Tucker { shape: Vec<usize>, ranks: Vec<usize>, core: String, factors: Vec<String> },
}

fn factor_names(order: usize) -> Vec<String> {
    (0..order).map(|n| format!("factor_{n}.tnsr")).collect()
}

fn write_manifest(dir: &Path, manifest: &impl Serialize) -> Result<()> {
    fs::write(dir.join(MANIFEST), serde_json::to_string_pretty(manifest)? + "\n")?;
    Ok(())
}

/// Writes a Kruskal or Tucker tensor into `dir`, creating it if needed.
pub fn save_factorized(model: &Weight, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    match model {
        Weight::Kruskal(k) => {
            let names = factor_names(k.order());
            for (f, name) in k.factors().iter().zip(&names) {
                save_matrix(f, &dir.join(name))?;
            }
            write_manifest(
                dir,
                &ModelManifest::Kruskal { shape: k.shape(), rank: k.rank(), weights: k.weights().to_vec(), factors: names },
            )
        }
        Weight::Tucker(t) => {
            let names = factor_names(t.factors().len());
            for (f, name) in t.factors().iter().zip(&names) {
                save_matrix(f, &dir.join(name))?;
            }
            save_tensor(t.core(), dir.join("core.tnsr"))?;
            write_manifest(
                dir,
                &ModelManifest::Tucker {
                    shape: t.shape(),
                    ranks: t.ranks().to_vec(),
                    core: "core.tnsr".into(),
                    factors: names,
                },
            )
        }
    }
}

/// Reads a directory written by [`save_factorized`].
pub fn load_factorized(dir: impl AsRef<Path>) -> Result<Weight> {
    let dir = dir.as_ref();
    let manifest: ModelManifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST))?)?;
    match manifest {
        ModelManifest::Kruskal { shape, rank, weights, factors } => {
            if factors.len() != shape.len() || weights.len() != rank {
                return Err(TensorError::Corrupt(format!(
                    "manifest lists {} factors and {} weights for shape {shape:?}, rank {rank}",
                    factors.len(),
                    weights.len()
                )));
            }
            let mats = factors
                .iter()
                .zip(&shape)
                .map(|(name, &d)| load_matrix(&dir.join(name), d, rank))
                .collect::<Result<Vec<_>>>()?;
            Ok(Weight::Kruskal(KruskalTensor::new(weights, mats)?))
        }
        ModelManifest::Tucker { shape, ranks, core, factors } => {
            if factors.len() != shape.len() || ranks.len() != shape.len() {
                return Err(TensorError::Corrupt(format!(
                    "manifest lists {} factors and ranks {ranks:?} for shape {shape:?}",
                    factors.len()
                )));
            }
            let core = load_tensor(dir.join(core))?;
            if core.shape() != ranks.as_slice() {
                return Err(TensorError::Corrupt(format!("core has shape {:?}, manifest ranks {ranks:?}", core.shape())));
            }
            let mats = factors
                .iter()
                .enumerate()
                .map(|(n, name)| load_matrix(&dir.join(name), shape[n], ranks[n]))
                .collect::<Result<Vec<_>>>()?;
            Ok(Weight::Tucker(TuckerTensor::new(core, mats)?))
        }
    }
}

pub fn save_kruskal(k: &KruskalTensor, dir: impl AsRef<Path>) -> Result<()> {
    save_factorized(&Weight::Kruskal(k.clone()), dir)
}

pub fn save_tucker(t: &TuckerTensor, dir: impl AsRef<Path>) -> Result<()> {
    save_factorized(&Weight::Tucker(t.clone()), dir)
}

pub fn load_kruskal(dir: impl AsRef<Path>) -> Result<KruskalTensor> {
    match load_factorized(dir)? {
        Weight::Kruskal(k) => Ok(k),
        Weight::Tucker(_) => Err(TensorError::Format("directory holds a Tucker tensor, not a Kruskal one".into())),
    }
}

pub fn load_tucker(dir: impl AsRef<Path>) -> Result<TuckerTensor> {
    match load_factorized(dir)? {
        Weight::Tucker(t) => Ok(t),
        Weight::Kruskal(_) => Err(TensorError::Format("directory holds a Kruskal tensor, not a Tucker one".into())),
    }
}

/// Covariates and responses for regression.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionDataset {
    pub covariates: Vec<DenseTensor>,
    pub responses: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CovariateManifest {
    covariates: Vec<String>,
}

/// Parses one float per line; blank lines are skipped.
pub fn read_responses(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    fs::read_to_string(path)?
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            line.trim().parse::<f64>().map_err(|e| {
                TensorError::Format(format!("{}:{}: cannot parse {:?} as a number ({e})", path.display(), i + 1, line))
            })
        })
        .collect()
}

pub fn load_regression_dataset(responses: impl AsRef<Path>, covariate_dir: impl AsRef<Path>) -> Result<RegressionDataset> {
    let dir = covariate_dir.as_ref();
    let manifest: CovariateManifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST))?)?;
    let covariates = manifest.covariates.iter().map(|name| load_tensor(dir.join(name))).collect::<Result<Vec<_>>>()?;
    let responses = read_responses(responses)?;
    if covariates.len() != responses.len() {
        return Err(mismatch!("{} covariate tensors but {} responses", covariates.len(), responses.len()));
    }
    Ok(RegressionDataset { covariates, responses })
}

pub fn save_regression_dataset(
    data: &RegressionDataset,
    responses: impl AsRef<Path>,
    covariate_dir: impl AsRef<Path>,
) -> Result<()> {
    if data.covariates.len() != data.responses.len() {
        return Err(mismatch!("{} covariate tensors but {} responses", data.covariates.len(), data.responses.len()));
    }
    let dir = covariate_dir.as_ref();
    fs::create_dir_all(dir)?;
    let names: Vec<String> = (0..data.covariates.len()).map(|i| format!("x_{i:05}.tnsr")).collect();
    for (x, name) in data.covariates.iter().zip(&names) {
        save_tensor(x, dir.join(name))?;
    }
    write_manifest(dir, &CovariateManifest { covariates: names })?;
    let text: String = data.responses.iter().map(|v| format!("{v:?}\n")).collect();
    fs::write(responses, text)?;
    Ok(())
}

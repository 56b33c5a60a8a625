//! Fixed-iteration timing harness behind the `bench` binary.
//!
//! For one (method, shape, rank) the harness draws a seeded Gaussian tensor
//! (absolute values for the non-negative methods), runs the fit once as a
//! discarded warm-up, then times `repeats` further fits with the tolerance
//! disabled so every run performs exactly `iters` sweeps. Only the fit call
//! is timed, initialization included; generating the tensor is not.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decomposition::{cp_als, nn_cp_mu, nn_tucker_mu, tucker_hooi, FitOptions, FitReport, Init, Rank};
use crate::error::{invalid, Result, TensorError};
use crate::rpca::{robust_tpca, RpcaOptions};
use crate::tensor::DenseTensor;

pub const TIMING_NOTE: &str = "wall-clock seconds per fit call, initialization included, tensor generation excluded";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cp,
    Tucker,
    Nncp,
    Nntucker,
    Rpca,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cp => "cp",
            Method::Tucker => "tucker",
            Method::Nncp => "nncp",
            Method::Nntucker => "nntucker",
            Method::Rpca => "rpca",
        }
    }

    fn nonnegative(self) -> bool {
        matches!(self, Method::Nncp | Method::Nntucker)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = TensorError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cp" => Ok(Method::Cp),
            "tucker" => Ok(Method::Tucker),
            "nncp" => Ok(Method::Nncp),
            "nntucker" => Ok(Method::Nntucker),
            "rpca" => Ok(Method::Rpca),
            other => Err(invalid!("unknown method {other:?}, expected cp, tucker, nncp, nntucker or rpca")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = TensorError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(invalid!("unknown format {other:?}, expected csv or json")),
        }
    }
}

/// One benchmark invocation. Also the schema of `bench --config FILE`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub method: Method,
    pub shape: Vec<usize>,
    /// CP rank, or Tucker ranks; ignored by `rpca`.
    pub rank: Rank,
    pub iters: usize,
    pub repeats: usize,
    pub seed: u64,
    pub init: Init,
    pub format: ReportFormat,
    pub out: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            method: Method::Cp,
            shape: vec![50, 50, 50],
            rank: Rank::Single(5),
            iters: 100,
            repeats: 10,
            seed: 42,
            init: Init::Random,
            format: ReportFormat::Csv,
            out: None,
        }
    }
}

impl BenchConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| invalid!("config {}: {e}", path.display()))
    }

    /// Ranks as reported: one entry for CP, one per mode for Tucker, none for RPCA.
    fn reported_rank(&self) -> Result<Vec<usize>> {
        match self.method {
            Method::Cp | Method::Nncp => Ok(vec![self.rank.single()?]),
            Method::Tucker | Method::Nntucker => {
                let ranks = self.rank.per_mode(self.shape.len())?;
                if let Some(k) = (0..ranks.len()).find(|&k| ranks[k] > self.shape[k]) {
                    return Err(invalid!("rank {} for mode {k} exceeds dimension {}", ranks[k], self.shape[k]));
                }
                Ok(ranks)
            }
            Method::Rpca => Ok(Vec::new()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shape.is_empty() || self.shape.contains(&0) {
            return Err(invalid!("shape must be non-empty with positive dimensions, got {:?}", self.shape));
        }
        if self.method == Method::Rpca && self.shape.len() < 2 {
            return Err(invalid!("rpca needs an order >= 2 shape"));
        }
        if self.iters == 0 {
            return Err(invalid!("iters must be at least 1"));
        }
        if self.repeats == 0 {
            return Err(invalid!("repeats must be at least 1"));
        }
        self.reported_rank().map(|_| ())
    }

    /// The seeded input tensor.
    pub fn input(&self) -> Result<DenseTensor> {
        let x = DenseTensor::random_gaussian(&self.shape, self.seed)?;
        Ok(if self.method.nonnegative() { x.map(f64::abs) } else { x })
    }

    fn fit_options(&self) -> FitOptions {
        FitOptions { rank: self.rank.clone(), init: self.init, seed: self.seed, ..FitOptions::default() }
            .fixed_iterations(self.iters)
    }

    /// Runs the configured method once on `x`.
    pub fn fit(&self, x: &DenseTensor) -> Result<FitReport> {
        let opts = self.fit_options();
        Ok(match self.method {
            Method::Cp => cp_als(x, &opts)?.1,
            Method::Tucker => tucker_hooi(x, &opts)?.1,
            Method::Nncp => nn_cp_mu(x, &opts)?.1,
            Method::Nntucker => nn_tucker_mu(x, &opts)?.1,
            Method::Rpca => {
                let r = robust_tpca(
                    x,
                    &RpcaOptions::default().with_max_iters(self.iters).with_tol(0.0).with_seed(self.seed),
                )?;
                FitReport {
                    objective_trace: r.residual_trace,
                    iterations_run: r.iterations_run,
                    converged: r.converged,
                    seed: self.seed,
                }
            }
        })
    }
}

/// One row of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub shape: Vec<usize>,
    pub rank: Vec<usize>,
    pub iterations: usize,
    pub repeats: usize,
    #[serde(rename = "mean_s")]
    pub mean: f64,
    #[serde(rename = "std_s")]
    pub std: f64,
    #[serde(rename = "samples_s")]
    pub samples: Vec<f64>,
}

impl BenchRecord {
    /// Fills in `repeats`, mean and population standard deviation from the samples.
    pub fn from_samples(method: Method, shape: Vec<usize>, rank: Vec<usize>, iterations: usize, samples: Vec<f64>) -> Self {
        let (mean, std) = mean_std(&samples);
        Self { method, shape, rank, iterations, repeats: samples.len(), mean, std, samples }
    }
}

/// Mean and population (ddof = 0) standard deviation.
pub fn mean_std(samples: &[f64]) -> (f64, f64) {
    if samples.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let x = config.input()?;
    config.fit(&x)?;

    let mut samples = Vec::with_capacity(config.repeats);
    for _ in 0..config.repeats {
        let start = Instant::now();
        let report = config.fit(&x)?;
        samples.push(start.elapsed().as_secs_f64());
        if report.iterations_run != config.iters {
            return Err(TensorError::Numeric(format!(
                "{} ran {} iterations, expected exactly {}",
                config.method, report.iterations_run, config.iters
            )));
        }
    }
    Ok(vec![BenchRecord::from_samples(config.method, config.shape.clone(), config.reported_rank()?, config.iters, samples)])
}

pub const CSV_HEADER: &str = "method,shape,rank,iterations,repeats,mean_s,std_s,samples_s";

fn join<T: ToString>(values: &[T], sep: &str) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

#[derive(Serialize, Deserialize)]
struct JsonReport {
    timing: String,
    records: Vec<BenchRecord>,
}

/// The report as text. Identical records always give identical bytes.
pub fn render_report(records: &[BenchRecord], format: ReportFormat) -> Result<String> {
    if records.is_empty() {
        return Err(invalid!("no benchmark records to report"));
    }
    Ok(match format {
        ReportFormat::Csv => {
            let mut out = format!("{CSV_HEADER}\n");
            for r in records {
                out += &format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.method,
                    join(&r.shape, "x"),
                    join(&r.rank, "x"),
                    r.iterations,
                    r.repeats,
                    r.mean,
                    r.std,
                    join(&r.samples, ";")
                );
            }
            out
        }
        ReportFormat::Json => {
            let report = JsonReport { timing: TIMING_NOTE.into(), records: records.to_vec() };
            serde_json::to_string_pretty(&report)? + "\n"
        }
    })
}

pub fn emit_report(records: &[BenchRecord], format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, render_report(records, format)?)?;
    Ok(())
}

/// Records from a JSON report written by [`emit_report`].
pub fn parse_json_report(text: &str) -> Result<Vec<BenchRecord>> {
    Ok(serde_json::from_str::<JsonReport>(text)?.records)
}

/// Thread cap from `TK_THREADS`: `None` when unset or empty.
pub fn thread_limit(value: Option<&str>) -> Result<Option<usize>> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(invalid!("TK_THREADS must be a positive integer, got {v:?}")),
        },
    }
}

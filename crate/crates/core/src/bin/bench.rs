//! Fixed-iteration benchmark for the tensorkit decompositions.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tensorkit::bench::{self, BenchConfig, Method, ReportFormat};
use tensorkit::decomposition::{Init, Rank};

/// Times a decomposition over repeated fixed-iteration runs and writes a CSV
/// or JSON report. Timings cover the fit call only (initialization included,
/// tensor generation excluded). TK_THREADS caps the worker threads.
#[derive(Parser, Debug)]
#[command(name = "bench", version)]
struct Args {
    /// cp, tucker, nncp, nntucker or rpca
    #[arg(long)]
    method: Option<Method>,
    /// Comma-separated dimensions, e.g. 50,50,50
    #[arg(long, value_delimiter = ',')]
    shape: Option<Vec<usize>>,
    /// CP rank, or comma-separated Tucker ranks
    #[arg(long, value_delimiter = ',')]
    rank: Option<Vec<usize>>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// csv or json
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Report path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// svd or random
    #[arg(long)]
    init: Option<Init>,
    /// JSON config file; flags given on the command line override it
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Args {
    fn into_config(self) -> tensorkit::Result<BenchConfig> {
        let mut c = match &self.config {
            Some(path) => BenchConfig::from_json_file(path)?,
            None => BenchConfig::default(),
        };
        if let Some(m) = self.method {
            c.method = m;
        }
        if let Some(s) = self.shape {
            c.shape = s;
        }
        if let Some(r) = self.rank {
            c.rank = if r.len() == 1 { Rank::Single(r[0]) } else { Rank::PerMode(r) };
        }
        c.iters = self.iters.unwrap_or(c.iters);
        c.repeats = self.repeats.unwrap_or(c.repeats);
        c.seed = self.seed.unwrap_or(c.seed);
        c.format = self.format.unwrap_or(c.format);
        c.init = self.init.unwrap_or(c.init);
        c.out = self.out.or(c.out);
        Ok(c)
    }
}

fn run(args: Args) -> tensorkit::Result<()> {
    if let Some(n) = bench::thread_limit(std::env::var("TK_THREADS").ok().as_deref())? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| tensorkit::TensorError::InvalidArgument(format!("cannot size thread pool: {e}")))?;
    }
    let config = args.into_config()?;
    config.validate()?;
    let records = bench::run_benchmark(&config)?;
    match &config.out {
        Some(path) => bench::emit_report(&records, config.format, path),
        None => {
            print!("{}", bench::render_report(&records, config.format)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::FAILURE
        }
    }
}

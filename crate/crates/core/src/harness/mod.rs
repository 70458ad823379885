//! Experiment driver behind the `sptri` binary.
//!
//! Every sweep returns a [`SweepOutcome`]: the records, in canonical order,
//! plus the list of assertions that failed. Records are written as CSV or
//! JSON lines; a run manifest next to the output file pins everything
//! needed to reproduce it.

pub mod cli;
pub mod ranges;
pub mod selftest;
pub mod sweeps;

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::trigpoly::QuadratureConfig;

pub use sweeps::{cmd_dirichlet, cmd_hankel_check, cmd_witness, HankelCheckParams, WitnessParams};

/// Environment variable overriding the quadrature `max_grid`.
pub const MAX_GRID_ENV: &str = "SPTRI_MAX_GRID";

/// Column order of the CSV output.
pub const CSV_HEADER: &str = "experiment,k,n,p,value,lower_env,upper_env,quad_points,seed,wall_ms";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// Bad arguments or configuration (exit code 2).
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub experiment: String,
    pub k: Option<u32>,
    pub n: u64,
    pub p: f64,
    /// `NaN` when the computation behind the row failed.
    pub value: f64,
    pub lower_env: Option<f64>,
    pub upper_env: Option<f64>,
    /// Quadrature cells (or matrix size for SVD-only rows).
    pub quad_points: u64,
    pub seed: Option<u64>,
    pub wall_ms: u64,
}

impl SweepRecord {
    pub fn new(experiment: &str, n: u64, p: f64) -> Self {
        Self {
            experiment: experiment.to_string(),
            k: None,
            n,
            p,
            value: f64::NAN,
            lower_env: None,
            upper_env: None,
            quad_points: 0,
            seed: None,
            wall_ms: 0,
        }
    }

    fn sort_key(&self) -> (&str, Option<u32>, u64, f64) {
        (&self.experiment, self.k, self.n, self.p)
    }
}

/// Sorts by `(experiment, k, n, p)`.
pub fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| {
        let (ea, ka, na, pa) = a.sort_key();
        let (eb, kb, nb, pb) = b.sort_key();
        ea.cmp(eb).then(ka.cmp(&kb)).then(na.cmp(&nb)).then(pa.total_cmp(&pb))
    });
}

/// Records plus the assertions that did not hold.
#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<String>,
    /// Aggregates printed after the run (bands, empirical constants).
    pub notes: Vec<String>,
}

impl SweepOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

pub fn write_records(records: &[SweepRecord], format: Format, out: impl Write) -> Result<(), HarnessError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if records.is_empty() {
                w.write_record(CSV_HEADER.split(','))?;
            }
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut out = out;
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Reads records back from CSV.
pub fn read_csv_records(input: impl std::io::Read) -> Result<Vec<SweepRecord>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// Quadrature settings for a run: `rel_tol` from the command line, the
/// grid cap from [`MAX_GRID_ENV`] when set.
pub fn quadrature_config(rel_tol: f64) -> Result<QuadratureConfig, HarnessError> {
    let mut cfg = QuadratureConfig {
        rel_tol,
        ..QuadratureConfig::default()
    };
    if let Ok(raw) = std::env::var(MAX_GRID_ENV) {
        cfg.max_grid = raw
            .trim()
            .parse()
            .map_err(|_| HarnessError::Usage(format!("{MAX_GRID_ENV}=`{raw}` is not an integer")))?;
    }
    cfg.validate()
        .map_err(|e| HarnessError::Usage(format!("quadrature config: {e}")))?;
    Ok(cfg)
}

/// Everything needed to rerun a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: serde_json::Value,
    pub bump: String,
    pub quadrature: QuadratureConfig,
    pub seed: Option<u64>,
    pub started: String,
    pub finished: String,
}

impl RunManifest {
    pub fn path_for(out: &Path) -> PathBuf {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write(&self, out: &Path) -> Result<PathBuf, HarnessError> {
        let path = Self::path_for(out);
        let file = std::fs::File::create(&path)?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        Ok(serde_json::from_reader(std::fs::File::open(path)?)?)
    }
}

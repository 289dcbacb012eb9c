//! Scenario execution with metadata, and CSV trace files.
//!
//! Column order is fixed by [`CSV_HEADER`]. Floats are written in shortest
//! round-trip form, so re-reading a file reproduces every value bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use flc_sldo_core::integrate::Scheme;
use flc_sldo_core::scenario::{run_with, Clean, Diagnostics, RunOutput, ScenarioConfig, TraceRecord};
use flc_sldo_core::t2nfs::T2nfsParams;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::to_toml;
use crate::error::{Result, SimError};
use crate::noise::GaussianNoise;

pub const CSV_HEADER: &str = "t,x1,x2,u,d_true,d_hat_bn,d_hat_sl,tau,tau_c,tau_n,s,q,guards";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceMeta {
    /// SHA-256 of the canonical TOML form of the config.
    pub config_hash: String,
    pub scheme: Scheme,
    pub version: String,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub config: ScenarioConfig,
    pub records: Vec<TraceRecord>,
    /// `(ξ₁, ξ₂)` per record.
    pub inputs: Vec<[f64; 2]>,
    pub diagnostics: Diagnostics,
    pub final_params: T2nfsParams,
    pub l1: f64,
    pub meta: TraceMeta,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn config_hash(config: &ScenarioConfig) -> String {
    hex(&Sha256::digest(to_toml(config).as_bytes()))
}

/// Runs the closed loop, with measurement noise when the config asks for it.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunTrace> {
    let out: RunOutput = match &config.noise {
        Some(noise) => run_with(config, &mut GaussianNoise::new(noise))?,
        None => run_with(config, &mut Clean)?,
    };
    Ok(RunTrace {
        config: config.clone(),
        records: out.records,
        inputs: out.inputs,
        diagnostics: out.diagnostics,
        final_params: out.final_params,
        l1: out.l1,
        meta: TraceMeta {
            config_hash: config_hash(config),
            scheme: config.scheme,
            version: env!("CARGO_PKG_VERSION").to_owned(),
        },
    })
}

pub fn write_csv<W: Write>(records: &[TraceRecord], every: usize, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let every = every.max(1);
    for r in records.iter().step_by(every) {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| SimError::io(path, e))
}

/// Full-rate trace.
pub fn export_trace(records: &[TraceRecord], path: &Path) -> Result<()> {
    export_downsampled(records, path, 1)
}

/// Every `every`-th record, starting with the first.
pub fn export_downsampled(records: &[TraceRecord], path: &Path, every: usize) -> Result<()> {
    write_csv(records, every, create(path)?).map_err(|source| SimError::Csv {
        path: path.to_owned(),
        source,
    })
}

pub fn read_csv<R: std::io::Read>(input: R) -> csv::Result<Vec<TraceRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn import_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let file = File::open(path).map_err(|e| SimError::io(path, e))?;
    read_csv(file).map_err(|source| SimError::Csv {
        path: path.to_owned(),
        source,
    })
}

/// SHA-256 of the full-rate CSV encoding.
pub fn trace_hash(records: &[TraceRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, 1, &mut buf).expect("writing to memory cannot fail");
    hex(&Sha256::digest(&buf))
}

pub fn write_meta(meta: &TraceMeta, path: &Path) -> Result<()> {
    let text = toml::to_string(meta).expect("metadata always serializes");
    std::fs::write(path, text).map_err(|e| SimError::io(path, e))
}

/// Fuzzy parameters as `path,value` rows.
pub fn write_params_table(params: &T2nfsParams, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let csv_err = |source| SimError::Csv {
        path: path.to_owned(),
        source,
    };
    w.write_record(["path", "value"]).map_err(csv_err)?;
    for (name, value) in params.flat_table() {
        w.write_record([name, value.to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| SimError::io(path, e))
}

//! Result files: one CSV, summary.json and manifest.json per run.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tdpf::{Error, Result};

/// What a subcommand hands back before anything is written.
pub struct Report {
    pub csv_name: &'static str,
    pub csv: Vec<u8>,
    pub summary: Value,
    pub violations: usize,
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::invalid(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Provenance written beside the results. Deliberately free of timestamps and worker counts.
pub struct Provenance<'a> {
    pub subcommand: &'a str,
    pub config_bytes: &'a [u8],
    pub oracle_tol: f64,
}

/// Writes the CSV, summary and manifest; returns their paths in that order.
pub fn write(dir: &Path, report: &Report, prov: &Provenance) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(report.csv_name);
    std::fs::write(&csv_path, &report.csv)?;
    let summary = pretty(&report.summary)?;
    let summary_path = dir.join("summary.json");
    std::fs::write(&summary_path, &summary)?;
    let manifest = json!({
        "tool": "tdpf",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": prov.subcommand,
        "config_sha256": sha256_hex(prov.config_bytes),
        "oracle_tol": prov.oracle_tol,
        "violations": report.violations,
        "files": {
            report.csv_name: sha256_hex(&report.csv),
            "summary.json": sha256_hex(&summary),
        },
    });
    let manifest_path = dir.join("manifest.json");
    std::fs::write(&manifest_path, pretty(&manifest)?)?;
    Ok(vec![csv_path, summary_path, manifest_path])
}

fn pretty(v: &Value) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v).map_err(|e| Error::invalid(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

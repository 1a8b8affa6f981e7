//! Experiment drivers producing result tables.
//!
//! Every driver takes a serializable config; output file names carry the
//! first 16 hex digits of the SHA-256 of the config's JSON form. Work is
//! split into fixed units evaluated in parallel and assembled in order, so
//! results do not depend on the thread count.

mod moments;
mod normalized;
mod scan;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub use moments::{
    run_covariance_verification, run_moment_scaling, CovarianceConfig, CovarianceResult,
    CovarianceRow, MomentRow, MomentScalingConfig, MomentScalingResult, MAX_COVARIANCE_DIM,
    MAX_MOMENT_QUBITS,
};
pub use normalized::{
    run_normalized_de, IngestPair, NormalizedDeConfig, NormalizedDeResult, NormalizedDeRow,
    NormalizedDeSource,
};
pub use scan::{run_ergodicity_scan, ScanConfig, ScanResult, ScanRow, ScanSummaryRow};

/// Seed-path tag for sampling streams, kept apart from circuit streams.
pub(crate) const SAMPLE_STREAM: u64 = 0x5341_4d50;

/// Paths of the two files written for a result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// First 16 hex digits of the SHA-256 of `config` serialized as JSON.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&json);
    Ok(digest[..8]
        .iter()
        .fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        }))
}

/// A result with a CSV table and a JSON summary.
pub trait ResultTable {
    /// File stem, e.g. `scan`.
    fn stem(&self) -> &'static str;

    fn config_hash(&self) -> &str;

    fn to_csv(&self) -> String;

    fn to_json(&self) -> Result<String>;

    /// Write `<stem>-<hash>.csv` and `<stem>-<hash>.json` into `dir`.
    fn write(&self, dir: &Path) -> Result<OutputFiles> {
        std::fs::create_dir_all(dir)?;
        let base = format!("{}-{}", self.stem(), self.config_hash());
        let files = OutputFiles {
            csv: dir.join(format!("{base}.csv")),
            json: dir.join(format!("{base}.json")),
        };
        std::fs::write(&files.csv, self.to_csv())?;
        std::fs::write(&files.json, self.to_json()?)?;
        Ok(files)
    }
}

/// Join cells into one CSV line with a trailing newline.
pub(crate) fn csv_line<S: AsRef<str>>(cells: &[S]) -> String {
    let mut line = cells
        .iter()
        .map(AsRef::as_ref)
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

pub(crate) fn pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use flexqr::Dataset;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct Fingerprint {
    pub source: String,
    pub rows: usize,
    pub columns: usize,
    pub sha256: String,
}

impl Fingerprint {
    /// Hash of the raw file bytes.
    pub fn of_file(path: &Path, ds: &Dataset) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::data_at(path, e))?;
        Ok(Self {
            source: path.display().to_string(),
            rows: ds.n(),
            columns: ds.p(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        })
    }

    /// Hash of the in-memory values (y then the row-major design, little endian).
    pub fn of_dataset(source: String, ds: &Dataset) -> Self {
        let mut h = Sha256::new();
        for v in ds.y().iter().chain(ds.design()) {
            h.update(v.to_le_bytes());
        }
        Self {
            source,
            rows: ds.n(),
            columns: ds.p(),
            sha256: hex::encode(h.finalize()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub prng: &'static str,
    pub datasets: Vec<Fingerprint>,
    pub version: &'static str,
    pub warnings: Vec<String>,
    pub started_unix_seconds: u64,
    pub wall_clock_seconds: f64,
}

pub struct ManifestBuilder {
    command_line: Vec<String>,
    config: serde_json::Value,
    started: Instant,
    started_unix: u64,
}

impl ManifestBuilder {
    pub fn start(command_line: Vec<String>, config: &impl Serialize) -> Self {
        Self {
            command_line,
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            started: Instant::now(),
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn finish(
        self,
        seeds: Vec<u64>,
        datasets: Vec<Fingerprint>,
        warnings: Vec<String>,
    ) -> RunManifest {
        RunManifest {
            command_line: self.command_line,
            config: self.config,
            seeds,
            prng: flexqr::PRNG_NAME,
            datasets,
            version: env!("CARGO_PKG_VERSION"),
            warnings,
            started_unix_seconds: self.started_unix,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        crate::output::write_file(&dir.join("manifest.json"), &(self.to_json() + "\n"))
    }
}

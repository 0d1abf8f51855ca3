//! CSV ingestion and seeded synthetic benchmark data.
//!
//! Random numbers come from SplitMix64 used in counter mode: draw `k` of a
//! stream with seed `s` is `mix64(s + (k + 1) * 0x9E3779B97F4A7C15)`, where
//! `mix64` is the SplitMix64 finalizer. Observation `i` of the normal
//! generator uses draws `3i` (x), `3i + 1` and `3i + 2` (Box-Muller, cosine
//! branch); the Pareto generator uses draws `2i` (x) and `2i + 1` (noise).
//! Uniforms take the top 53 bits and are centred in their bin, so they lie
//! strictly inside (0, 1).

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::dataset::{Dataset, INTERCEPT};
use crate::error::{QrError, Result};

/// Name of the generator recorded in run manifests.
pub const PRNG_NAME: &str = "splitmix64-counter";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Counter-based SplitMix64 stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn u64_at(&self, k: u64) -> u64 {
        mix64(
            self.seed
                .wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform_at(&self, k: u64) -> f64 {
        ((self.u64_at(k) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal from draws `k` and `k + 1`.
    pub fn normal_at(&self, k: u64) -> f64 {
        let u1 = self.uniform_at(k);
        let u2 = self.uniform_at(k + 1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    HeteroNormal,
    Pareto,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::HeteroNormal => "normal",
            NoiseKind::Pareto => "pareto",
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = QrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "hetero-normal" => Ok(NoiseKind::HeteroNormal),
            "pareto" => Ok(NoiseKind::Pareto),
            other => Err(QrError::InvalidConfig(format!(
                "unknown noise kind '{other}' (expected normal or pareto)"
            ))),
        }
    }
}

/// Synthetic simple-regression benchmark settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    pub seed: u64,
    pub kind: NoiseKind,
    pub x_range: (f64, f64),
    pub beta0: f64,
    pub beta1: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    pub pareto_alpha: f64,
    pub pareto_scale: f64,
}

impl SynthConfig {
    pub fn new(kind: NoiseKind, n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            kind,
            x_range: (0.0, 10.0),
            beta0: 1.0,
            beta1: 2.0,
            sigma0: 0.5,
            sigma1: 0.3,
            pareto_alpha: 2.5,
            pareto_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(QrError::InvalidConfig(m));
        if self.n < 3 {
            return bad(format!("n must be >= 3, got {}", self.n));
        }
        let (lo, hi) = self.x_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad(format!(
                "x_range must be a finite interval, got [{lo}, {hi}]"
            ));
        }
        if !(self.beta0.is_finite() && self.beta1.is_finite()) {
            return bad("coefficients must be finite".into());
        }
        match self.kind {
            NoiseKind::HeteroNormal => {
                if !(self.sigma0 >= 0.0 && self.sigma1 >= 0.0)
                    || !(self.sigma0.is_finite() && self.sigma1.is_finite())
                {
                    return bad("sigma0 and sigma1 must be finite and >= 0".into());
                }
                if self.sigma0 == 0.0 && self.sigma1 == 0.0 {
                    return bad("sigma0 and sigma1 cannot both be zero".into());
                }
            }
            NoiseKind::Pareto => {
                if !(self.pareto_alpha > 1.0 && self.pareto_alpha.is_finite()) {
                    return bad(format!(
                        "pareto_alpha must be > 1, got {}",
                        self.pareto_alpha
                    ));
                }
                if !(self.pareto_scale > 0.0 && self.pareto_scale.is_finite()) {
                    return bad(format!(
                        "pareto_scale must be > 0, got {}",
                        self.pareto_scale
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Dispatches on `config.kind`.
pub fn generate(config: &SynthConfig) -> Result<Dataset> {
    match config.kind {
        NoiseKind::HeteroNormal => gen_hetero_normal(config),
        NoiseKind::Pareto => gen_pareto(config),
    }
}

/// `y = beta0 + beta1 x + (sigma0 + sigma1 x) z`, `x ~ U(x_range)`, `z ~ N(0, 1)`.
pub fn gen_hetero_normal(config: &SynthConfig) -> Result<Dataset> {
    if config.kind != NoiseKind::HeteroNormal {
        return Err(QrError::InvalidConfig(
            "gen_hetero_normal needs kind = normal".into(),
        ));
    }
    config.validate()?;
    let rng = CounterRng::new(config.seed);
    let (lo, hi) = config.x_range;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (0..config.n as u64)
        .map(|i| {
            let x = lo + (hi - lo) * rng.uniform_at(3 * i);
            let z = rng.normal_at(3 * i + 1);
            let y = config.beta0 + config.beta1 * x + (config.sigma0 + config.sigma1 * x) * z;
            (x, y)
        })
        .unzip();
    Dataset::simple(&xs, &ys)
}

/// `y = beta0 + beta1 x + scale U^(-1/alpha)`; noise is one-sided, `>= scale`.
pub fn gen_pareto(config: &SynthConfig) -> Result<Dataset> {
    if config.kind != NoiseKind::Pareto {
        return Err(QrError::InvalidConfig(
            "gen_pareto needs kind = pareto".into(),
        ));
    }
    config.validate()?;
    let rng = CounterRng::new(config.seed);
    let (lo, hi) = config.x_range;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (0..config.n as u64)
        .map(|i| {
            let x = lo + (hi - lo) * rng.uniform_at(2 * i);
            let u = rng.uniform_at(2 * i + 1);
            let e = config.pareto_scale * u.powf(-1.0 / config.pareto_alpha);
            (x, config.beta0 + config.beta1 * x + e)
        })
        .unzip();
    Dataset::simple(&xs, &ys)
}

/// Column layout of a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub response: String,
    /// Predictor columns; all non-response columns when `None`.
    pub predictors: Option<Vec<String>>,
    pub delimiter: u8,
}

impl CsvSchema {
    pub fn new(response: impl Into<String>) -> Self {
        Self {
            response: response.into(),
            predictors: None,
            delimiter: b',',
        }
    }

    pub fn with_predictors(mut self, predictors: Vec<String>) -> Self {
        self.predictors = Some(predictors);
        self
    }
}

/// Loads a headed CSV file; the intercept column is appended last.
/// Blank lines are skipped and row numbers in errors count data rows from 1.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| QrError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_csv(file, schema)
}

pub fn read_csv<R: std::io::Read>(input: R, schema: &CsvSchema) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| QrError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(QrError::Csv("empty file".into()));
    }
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| QrError::Csv(format!("column '{name}' not found in header {header:?}")))
    };
    let response_idx = find(&schema.response)?;
    let predictor_names: Vec<String> = match &schema.predictors {
        Some(list) => list.clone(),
        None => header
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != response_idx)
            .map(|(_, h)| h.clone())
            .collect(),
    };
    let predictor_idx = predictor_names
        .iter()
        .map(|name| find(name))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut y = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let row_no = k + 1;
        let record = record.map_err(|e| QrError::Csv(format!("row {row_no}: {e}")))?;
        let cell = |j: usize| -> Result<f64> {
            let raw = record.get(j).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| QrError::CsvCell {
                    row: row_no,
                    column: header[j].clone(),
                    cell: raw.to_string(),
                })
        };
        y.push(cell(response_idx)?);
        rows.push(
            predictor_idx
                .iter()
                .map(|&j| cell(j))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    if y.is_empty() {
        return Err(QrError::Csv("no data rows".into()));
    }
    Dataset::from_rows(predictor_names, &rows, y)
}

/// Writes predictors (without the intercept) then the response, with 17
/// significant digits.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>, response: &str) -> Result<()> {
    let path = path.as_ref();
    let io_err = |e: std::io::Error| QrError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut out = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    let predictors: Vec<&str> = ds
        .names()
        .iter()
        .filter(|n| *n != INTERCEPT)
        .map(String::as_str)
        .collect();
    let k = predictors.len();
    let mut header = predictors.clone();
    header.push(response);
    writeln!(out, "{}", header.join(",")).map_err(io_err)?;
    for (row, y) in ds.rows().zip(ds.y()) {
        let cells: Vec<String> = row[..k]
            .iter()
            .chain(std::iter::once(y))
            .map(|v| format!("{v:.16e}"))
            .collect();
        writeln!(out, "{}", cells.join(",")).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn rng_is_counter_based() {
        let r = CounterRng::new(42);
        assert_eq!(r.u64_at(5), CounterRng::new(42).u64_at(5));
        assert_ne!(r.u64_at(5), r.u64_at(6));
        // SplitMix64 reference: first output for seed 0.
        assert_eq!(CounterRng::new(0).u64_at(0), 0xE220_A839_7B1D_CDAF);
        for k in 0..1000 {
            let u = r.uniform_at(k);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = SynthConfig::new(NoiseKind::HeteroNormal, 10, 1);
        c.sigma0 = 0.0;
        c.sigma1 = 0.0;
        assert!(gen_hetero_normal(&c).is_err());
        let c = SynthConfig::new(NoiseKind::HeteroNormal, 2, 1);
        assert!(gen_hetero_normal(&c).is_err());
        let mut c = SynthConfig::new(NoiseKind::Pareto, 10, 1);
        c.pareto_alpha = 1.0;
        assert!(gen_pareto(&c).is_err());
        assert!(gen_pareto(&SynthConfig::new(NoiseKind::HeteroNormal, 10, 1)).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        for kind in [NoiseKind::HeteroNormal, NoiseKind::Pareto] {
            let c = SynthConfig::new(kind, 50, 7);
            assert_eq!(generate(&c).unwrap(), generate(&c).unwrap());
            let other = SynthConfig { seed: 8, ..c };
            assert_ne!(generate(&c).unwrap(), generate(&other).unwrap());
        }
    }

    #[test]
    fn pareto_noise_is_one_sided() {
        let c = SynthConfig::new(NoiseKind::Pareto, 500, 3);
        let ds = gen_pareto(&c).unwrap();
        for (row, y) in ds.rows().zip(ds.y()) {
            assert!(y - (c.beta0 + c.beta1 * row[0]) >= c.pareto_scale);
        }
    }

    #[test]
    fn csv_basic() {
        let ds = read_csv(Cursor::new("x,y\n1,2\n2,4\n3,7\n"), &CsvSchema::new("y")).unwrap();
        assert_eq!((ds.n(), ds.p()), (3, 2));
        assert_eq!(ds.y(), &[2.0, 4.0, 7.0]);
        assert_eq!(ds.row(2), &[3.0, 1.0]);
    }

    #[test]
    fn csv_blank_lines_skipped() {
        let ds = read_csv(
            Cursor::new("x,y\n1,2\n\n2,4\n3,7\n\n"),
            &CsvSchema::new("y"),
        )
        .unwrap();
        assert_eq!(ds.n(), 3);
    }

    #[test]
    fn csv_non_numeric_names_row() {
        let e = read_csv(Cursor::new("x,y\n1,2\nabc,4\n3,7\n"), &CsvSchema::new("y")).unwrap_err();
        match &e {
            QrError::CsvCell { row, column, .. } => {
                assert_eq!(*row, 2);
                assert_eq!(column, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(e.to_string().contains("row 2"));
    }

    #[test]
    fn csv_missing_response_and_empty() {
        assert!(read_csv(Cursor::new("x,z\n1,2\n2,3\n"), &CsvSchema::new("y")).is_err());
        assert!(read_csv(Cursor::new(""), &CsvSchema::new("y")).is_err());
        assert!(read_csv(Cursor::new("x,y\n"), &CsvSchema::new("y")).is_err());
    }

    #[test]
    fn csv_predictor_selection() {
        let schema = CsvSchema::new("y").with_predictors(vec!["b".into()]);
        let ds = read_csv(Cursor::new("a,b,y\n1,2,3\n4,5,6\n7,9,9\n"), &schema).unwrap();
        assert_eq!(ds.p(), 2);
        assert_eq!(ds.row(0), &[2.0, 1.0]);
    }

    #[test]
    fn missing_file_names_path() {
        let e = load_csv("/definitely/not/here.csv", &CsvSchema::new("y")).unwrap_err();
        assert!(e.to_string().contains("/definitely/not/here.csv"));
    }
}

//! Regression datasets with an explicit trailing intercept column.

use crate::error::{QrError, Result};

/// Name given to the appended all-ones column.
pub const INTERCEPT: &str = "(Intercept)";

/// Design matrix `X` (n x p, row-major, intercept last) and response `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<f64>,
    n: usize,
    p: usize,
    names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from predictor rows (without intercept); the all-ones
    /// column is appended as the last column.
    pub fn from_rows(predictor_names: Vec<String>, rows: &[Vec<f64>], y: Vec<f64>) -> Result<Self> {
        let k = predictor_names.len();
        if rows.len() != y.len() {
            return Err(QrError::DimensionMismatch {
                expected: y.len(),
                got: rows.len(),
            });
        }
        let mut x = Vec::with_capacity(rows.len() * (k + 1));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(QrError::InvalidDataset(format!(
                    "row {} has {} predictors, expected {k}",
                    i + 1,
                    row.len()
                )));
            }
            x.extend_from_slice(row);
            x.push(1.0);
        }
        let mut names = predictor_names;
        names.push(INTERCEPT.to_string());
        Self::from_design(x, y, names)
    }

    /// Single-predictor dataset `y ~ x + 1`.
    pub fn simple(x: &[f64], y: &[f64]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        Self::from_rows(vec!["x".to_string()], &rows, y.to_vec())
    }

    /// Intercept-only dataset (p = 1).
    pub fn intercept_only(y: &[f64]) -> Result<Self> {
        let rows = vec![Vec::new(); y.len()];
        Self::from_rows(Vec::new(), &rows, y.to_vec())
    }

    /// Builds from a full row-major design whose last column must be the
    /// intercept.
    pub fn from_design(x: Vec<f64>, y: Vec<f64>, names: Vec<String>) -> Result<Self> {
        let n = y.len();
        let p = names.len();
        if p == 0 {
            return Err(QrError::InvalidDataset("no columns".into()));
        }
        if x.len() != n * p {
            return Err(QrError::DimensionMismatch {
                expected: n * p,
                got: x.len(),
            });
        }
        if n < p {
            return Err(QrError::InvalidDataset(format!(
                "need n >= p, got n = {n}, p = {p}"
            )));
        }
        if let Some(bad) = x.iter().chain(y.iter()).find(|v| !v.is_finite()) {
            return Err(QrError::NonFinite {
                what: "dataset",
                value: *bad,
            });
        }
        let is_ones = |j: usize| (0..n).all(|i| x[i * p + j] == 1.0);
        if !is_ones(p - 1) {
            return Err(QrError::InvalidDataset(
                "last design column must be the intercept".into(),
            ));
        }
        if let Some(j) = (0..p - 1).find(|&j| is_ones(j)) {
            return Err(QrError::InvalidDataset(format!(
                "column '{}' duplicates the intercept",
                names[j]
            )));
        }
        Ok(Self { x, y, n, p, names })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Column names, intercept last.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks_exact(self.p)
    }

    pub fn design(&self) -> &[f64] {
        &self.x
    }

    /// `x_i' beta` without dimension checks.
    #[inline]
    pub(crate) fn fitted_unchecked(&self, i: usize, beta: &[f64]) -> f64 {
        dot(self.row(i), beta)
    }

    pub fn check_beta(&self, beta: &[f64]) -> Result<()> {
        if beta.len() != self.p {
            return Err(QrError::DimensionMismatch {
                expected: self.p,
                got: beta.len(),
            });
        }
        Ok(())
    }

    /// Residuals `y_i - x_i' beta`.
    pub fn residuals(&self, beta: &[f64]) -> Result<Vec<f64>> {
        self.check_beta(beta)?;
        Ok(self
            .rows()
            .zip(&self.y)
            .map(|(row, &y)| y - dot(row, beta))
            .collect())
    }

    /// Same rows reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(QrError::DimensionMismatch {
                expected: self.n,
                got: perm.len(),
            });
        }
        let mut x = Vec::with_capacity(self.x.len());
        let mut y = Vec::with_capacity(self.n);
        for &i in perm {
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        Self::from_design(x, y, self.names.clone())
    }

    /// Range of predictor column `j` (used for 1-D crossing checks).
    pub fn column_range(&self, j: usize) -> (f64, f64) {
        self.rows()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r[j]), hi.max(r[j]))
            })
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

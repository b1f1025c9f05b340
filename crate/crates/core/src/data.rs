//! The dataset container and CSV ingestion.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

/// An outcome vector paired with an n x d covariate matrix (row major)
/// and named columns. Immutable once constructed; all entries finite.
#[derive(Debug, Clone)]
pub struct Dataset {
    outcomes: Vec<f64>,
    covariates: Vec<f64>,
    column_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        outcomes: Vec<f64>,
        covariates: Vec<f64>,
        column_names: Vec<String>,
    ) -> Result<Self> {
        let n = outcomes.len();
        let d = column_names.len();
        if n < 2 {
            return Err(Error::InsufficientData(format!(
                "need n >= 2 rows, got {n}"
            )));
        }
        if covariates.len() != n * d {
            return Err(Error::Data(format!(
                "covariate matrix has {} entries, expected {} ({} x {})",
                covariates.len(),
                n * d,
                n,
                d
            )));
        }
        if outcomes
            .iter()
            .chain(covariates.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::Data("non-finite entry in dataset".into()));
        }
        let mut seen = HashSet::new();
        for name in &column_names {
            if name.is_empty() {
                return Err(Error::Data("empty column name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Data(format!("duplicate column name `{name}`")));
            }
        }
        Ok(Dataset {
            outcomes,
            covariates,
            column_names,
        })
    }

    /// Load a headered CSV, taking `outcome_col` as the outcome and every
    /// other column as a covariate. Cells must be plain decimal numbers;
    /// missing cells are rejected.
    pub fn from_csv_path(path: &Path, outcome_col: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
        let outcome_idx = headers
            .iter()
            .position(|h| h == outcome_col)
            .ok_or_else(|| Error::Data(format!("outcome column `{outcome_col}` not found")))?;
        let column_names: Vec<String> = headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != outcome_idx)
            .map(|(_, h)| h.clone())
            .collect();

        let mut outcomes = Vec::new();
        let mut covariates = Vec::new();
        for (row_no, record) in reader.records().enumerate() {
            let record = record?;
            for (i, cell) in record.iter().enumerate() {
                if cell.is_empty() {
                    return Err(Error::Data(format!(
                        "missing cell in row {} column `{}`",
                        row_no + 2,
                        headers[i]
                    )));
                }
                let value: f64 = cell.parse().map_err(|_| {
                    Error::Data(format!(
                        "cannot parse `{cell}` in row {} column `{}`",
                        row_no + 2,
                        headers[i]
                    ))
                })?;
                if i == outcome_idx {
                    outcomes.push(value);
                } else {
                    covariates.push(value);
                }
            }
        }
        Dataset::new(outcomes, covariates, column_names)
    }

    pub fn n(&self) -> usize {
        self.outcomes.len()
    }

    pub fn d(&self) -> usize {
        self.column_names.len()
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn outcome(&self, row: usize) -> f64 {
        self.outcomes[row]
    }

    /// Full covariate row, in column order.
    pub fn row(&self, row: usize) -> &[f64] {
        let d = self.d();
        &self.covariates[row * d..(row + 1) * d]
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.covariates[row * self.d() + col]
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.column_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Data(format!("unknown column `{name}`")))
    }

    /// True when the column takes only the values 0 and 1 and both occur.
    pub fn is_binary_column(&self, col: usize) -> bool {
        let mut saw_zero = false;
        let mut saw_one = false;
        for row in 0..self.n() {
            let v = self.value(row, col);
            if v == 0.0 {
                saw_zero = true;
            } else if v == 1.0 {
                saw_one = true;
            } else {
                return false;
            }
        }
        saw_zero && saw_one
    }

    /// Restrict the binary column check to a subset of rows.
    #[cfg(test)]
    pub(crate) fn is_binary_on_rows(&self, col: usize, rows: &[usize]) -> bool {
        let mut saw_zero = false;
        let mut saw_one = false;
        for &row in rows {
            let v = self.value(row, col);
            if v == 0.0 {
                saw_zero = true;
            } else if v == 1.0 {
                saw_one = true;
            } else {
                return false;
            }
        }
        saw_zero && saw_one
    }
}

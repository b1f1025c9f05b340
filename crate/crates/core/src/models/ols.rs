//! Ordinary least squares via Householder QR.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::Prediction;

/// A fitted linear model. Coefficients are ordered intercept first, then
/// the covariates in the order they were requested.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    /// RSS / (n - p); the unbiased residual variance.
    pub residual_variance: f64,
    /// residual_variance * (X^T X)^{-1}, a p x p symmetric PSD matrix.
    pub coef_covariance: Vec<Vec<f64>>,
    pub n: usize,
    pub covariate_names: Vec<String>,
    covariate_cols: Vec<usize>,
}

impl OlsFit {
    /// Predict from a full covariate row of the originating dataset layout.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut y = self.coefficients[0];
        for (j, &col) in self.covariate_cols.iter().enumerate() {
            y += self.coefficients[j + 1] * row[col];
        }
        y
    }

    /// Slope on the single covariate; errors if the model is not simple.
    pub fn slope(&self) -> Result<f64> {
        if self.coefficients.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "expected one covariate, model has {}",
                self.coefficients.len() - 1
            )));
        }
        Ok(self.coefficients[1])
    }

    pub fn residual_sd(&self) -> f64 {
        self.residual_variance.sqrt()
    }
}

impl Prediction for OlsFit {
    fn predict(&self, row: &[f64]) -> f64 {
        self.predict_row(row)
    }
}

/// Least squares on all rows.
pub fn fit_ols(data: &Dataset, covariates: &[String]) -> Result<OlsFit> {
    let rows: Vec<usize> = (0..data.n()).collect();
    fit_ols_rows(data, &rows, covariates)
}

/// Least squares on a row subset. The design matrix is the intercept
/// column plus the selected covariates; it must have full column rank and
/// strictly more rows than columns.
pub fn fit_ols_rows(data: &Dataset, rows: &[usize], covariates: &[String]) -> Result<OlsFit> {
    let cols: Vec<usize> = covariates
        .iter()
        .map(|name| data.column_index(name))
        .collect::<Result<_>>()?;
    let n = rows.len();
    let p = cols.len() + 1;
    if n <= p {
        return Err(Error::InsufficientData(format!(
            "OLS needs n > p, got n = {n}, p = {p}"
        )));
    }

    // Column-major working copy of [1 | X_subset] and the outcome.
    let mut design: Vec<Vec<f64>> = Vec::with_capacity(p);
    design.push(vec![1.0; n]);
    for &c in &cols {
        design.push(rows.iter().map(|&r| data.value(r, c)).collect());
    }
    let mut y: Vec<f64> = rows.iter().map(|&r| data.outcome(r)).collect();

    let scale = design
        .iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);

    // Householder triangularization, reflecting y alongside.
    let mut r_mat = vec![vec![0.0f64; p]; p];
    for k in 0..p {
        let norm = design[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-10 * scale.max(1.0) {
            return Err(Error::SingularDesign(format!(
                "column {k} is linearly dependent on earlier columns"
            )));
        }
        let alpha = if design[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = design[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in design.iter_mut().skip(k) {
                let dot: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum();
                let f = 2.0 * dot / vnorm2;
                for (vi, ci) in v.iter().zip(col[k..].iter_mut()) {
                    *ci -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&y[k..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (vi, yi) in v.iter().zip(y[k..].iter_mut()) {
                *yi -= f * vi;
            }
        }
        for j in k..p {
            r_mat[k][j] = design[j][k];
        }
    }

    // Back substitution R beta = Q^T y (top p rows of the reflected y).
    let mut beta = vec![0.0f64; p];
    for i in (0..p).rev() {
        let mut s = y[i];
        for j in (i + 1)..p {
            s -= r_mat[i][j] * beta[j];
        }
        beta[i] = s / r_mat[i][i];
    }

    // RSS from the reflected tail of y.
    let rss: f64 = y[p..].iter().map(|v| v * v).sum();
    let residual_variance = (rss / (n - p) as f64).max(0.0);

    // (X^T X)^{-1} = R^{-1} R^{-T}.
    let rinv = invert_upper(&r_mat);
    let mut xtx_inv = vec![vec![0.0f64; p]; p];
    for i in 0..p {
        for j in 0..p {
            let mut s = 0.0;
            for (k, rik) in rinv[i].iter().enumerate() {
                s += rik * rinv[j][k];
            }
            xtx_inv[i][j] = s;
        }
    }
    let coef_covariance: Vec<Vec<f64>> = xtx_inv
        .iter()
        .map(|row| row.iter().map(|v| v * residual_variance).collect())
        .collect();

    Ok(OlsFit {
        coefficients: beta,
        residual_variance,
        coef_covariance,
        n,
        covariate_names: covariates.to_vec(),
        covariate_cols: cols,
    })
}

#[allow(clippy::needless_range_loop)]
fn invert_upper(r: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = r.len();
    let mut inv = vec![vec![0.0f64; p]; p];
    for col in 0..p {
        for i in (0..=col).rev() {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for j in (i + 1)..=col {
                s -= r[i][j] * inv[j][col];
            }
            inv[i][col] = s / r[i][i];
        }
    }
    inv
}

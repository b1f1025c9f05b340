//! Exact and asymptotic mappings among the PIP, p-values, MSE differences
//! and predictive-distribution overlap for the two-sample setting.
//!
//! The p-value side is the pooled-variance two-sample t-test expressed
//! through the OLS fit; for a balanced design its statistic reduces to
//! sqrt(n) |b1| / (2 s). The PIP <-> p-value maps invert each other
//! exactly, and composing them with the C1 plug-in is an identity.

use crate::data::Dataset;
use crate::dists::{
    std_normal_cdf, std_normal_quantile, std_normal_sf, student_t_isf, student_t_sf,
};
use crate::error::{Error, Result};
use crate::models::fit_ols;

/// Pooled-variance two-sample t-test summary.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TwoSampleTestResult {
    pub t_statistic: f64,
    pub df: u64,
    pub p_value: f64,
    pub beta1_hat: f64,
    pub se_beta1: f64,
}

/// Two-sided test of a zero group effect, via the OLS fit of outcome on
/// the 0/1 covariate. Works for unbalanced groups; the balanced case
/// reduces to the textbook sqrt(n) |b1| / (2 s) statistic.
pub fn pvalue_two_sample(data: &Dataset) -> Result<TwoSampleTestResult> {
    if data.d() != 1 {
        return Err(Error::InvalidArgument(format!(
            "two-sample test expects exactly one covariate, got {}",
            data.d()
        )));
    }
    if !data.is_binary_column(0) {
        return Err(Error::NonBinaryCovariate(data.column_names()[0].clone()));
    }
    if data.n() < 4 {
        return Err(Error::InsufficientData(format!(
            "two-sample test needs n >= 4, got {}",
            data.n()
        )));
    }
    let group = data.column_names()[0].clone();
    let fit = fit_ols(data, &[group])?;
    let beta1_hat = fit.coefficients[1];
    let se_beta1 = fit.coef_covariance[1][1].sqrt();
    if se_beta1 == 0.0 {
        // zero residual variance: identical values within each group
        return Ok(TwoSampleTestResult {
            t_statistic: if beta1_hat == 0.0 { 0.0 } else { f64::INFINITY },
            df: (data.n() - 2) as u64,
            p_value: if beta1_hat == 0.0 { 1.0 } else { 0.0 },
            beta1_hat,
            se_beta1,
        });
    }
    let t = beta1_hat / se_beta1;
    let df = (data.n() - 2) as u64;
    let p_value = 2.0 * student_t_sf(t.abs(), df)?;
    Ok(TwoSampleTestResult {
        t_statistic: t,
        df,
        p_value: p_value.min(1.0),
        beta1_hat,
        se_beta1,
    })
}

/// PIP implied by a two-sided p-value at sample size n:
/// Phi( t_isf(p/2; n-2) / (2 sqrt(n)) ). Inverting through the survival
/// function keeps tiny p-values exact.
pub fn pip_from_pvalue(p: f64, n: usize) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "p-value must lie in (0, 1], got {p}"
        )));
    }
    if n < 3 {
        return Err(Error::InsufficientData(format!("need n >= 3, got {n}")));
    }
    if p == 1.0 {
        return Ok(0.5);
    }
    let t = student_t_isf(0.5 * p, (n - 2) as u64)?;
    Ok(std_normal_cdf(t / (2.0 * (n as f64).sqrt())))
}

/// Exact inverse of [`pip_from_pvalue`]:
/// p = 2 (1 - F_t(2 sqrt(n) Phi^{-1}(pip); n-2)), defined for pip in
/// [0.5, 1).
pub fn pvalue_from_pip(pip: f64, n: usize) -> Result<f64> {
    if !(0.5..1.0).contains(&pip) {
        return Err(Error::InvalidArgument(format!(
            "mapping defined for pip in [0.5, 1), got {pip}"
        )));
    }
    if n < 3 {
        return Err(Error::InsufficientData(format!("need n >= 3, got {n}")));
    }
    if pip == 0.5 {
        return Ok(1.0);
    }
    let t = 2.0 * (n as f64).sqrt() * std_normal_quantile(pip)?;
    Ok((2.0 * student_t_sf(t, (n - 2) as u64)?).min(1.0))
}

/// Large-n limit of ln(p)/n implied by a PIP:
/// -(1/2) ln(1 + 4 Phi^{-1}(pip)^2).
pub fn asymptotic_scaled_log_p(pip: f64) -> Result<f64> {
    if !(pip > 0.0 && pip < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pip must lie in (0, 1), got {pip}"
        )));
    }
    let z = std_normal_quantile(pip)?;
    Ok(-0.5 * (1.0 + 4.0 * z * z).ln())
}

/// MSE(full) - MSE(null) implied by a PIP at error scale sigma:
/// -4 sigma^2 Phi^{-1}(pip)^2.
pub fn delta_mse_from_pip(pip: f64, sigma: f64) -> Result<f64> {
    if !(pip > 0.0 && pip < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pip must lie in (0, 1), got {pip}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let z = std_normal_quantile(pip)?;
    Ok(-4.0 * sigma * sigma * z * z)
}

/// Overlap of the two groups' predictive normal densities implied by a
/// PIP: 2 Phi( -2 Phi^{-1}(pip) / sqrt(1 + 2/n) ).
pub fn overlap_from_pip(pip: f64, n: usize) -> Result<f64> {
    if !(0.5..1.0).contains(&pip) {
        return Err(Error::InvalidArgument(format!(
            "overlap defined for pip in [0.5, 1), got {pip}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if pip == 0.5 {
        return Ok(1.0);
    }
    let z = std_normal_quantile(pip)?;
    Ok(2.0 * std_normal_cdf(-2.0 * z / (1.0 + 2.0 / n as f64).sqrt()))
}

/// Two-sided pooled two-proportion z-test without continuity correction.
/// A degenerate pooled proportion (all successes or all failures) forces
/// equal sample proportions, so the p-value is 1.
pub fn pvalue_two_proportion(x1: u64, n1: u64, x2: u64, n2: u64) -> Result<f64> {
    if n1 == 0 || n2 == 0 || x1 > n1 || x2 > n2 {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= x_i <= n_i with n_i >= 1, got ({x1}/{n1}, {x2}/{n2})"
        )));
    }
    let p1 = x1 as f64 / n1 as f64;
    let p2 = x2 as f64 / n2 as f64;
    let pooled = (x1 + x2) as f64 / (n1 + n2) as f64;
    if pooled == 0.0 || pooled == 1.0 {
        return Ok(1.0);
    }
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    let z = (p1 - p2) / se;
    Ok((2.0 * std_normal_sf(z.abs())).min(1.0))
}

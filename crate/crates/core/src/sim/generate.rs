//! Data generators for the simulation studies, plus truth models the
//! empirical conditional-PIP oracle can draw from.

use crate::data::Dataset;
use crate::dists::{sample_bernoulli, sample_standard_normal, sample_uniform};
use crate::error::{Error, Result};
use crate::plugin::TruthModel;
use crate::rng::RngStream;

/// Balanced two-sample data: exactly n/2 rows per group, outcome
/// beta0 + beta1 x + N(0, sigma^2). Covariate column `x`.
pub fn gen_two_sample(
    n: usize,
    beta0: f64,
    beta1: f64,
    sigma: f64,
    rng: &mut RngStream,
) -> Result<Dataset> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "balanced design needs even n >= 4, got {n}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be > 0, got {sigma}"
        )));
    }
    let half = n / 2;
    let mut y = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    for i in 0..n {
        let g = if i < half { 0.0 } else { 1.0 };
        x.push(g);
        y.push(beta0 + beta1 * g + sigma * sample_standard_normal(rng));
    }
    Dataset::new(y, x, vec!["x".into()])
}

/// Simple-regression data with x uniform on [a, b].
pub fn gen_linear_uniform(
    n: usize,
    beta0: f64,
    beta1: f64,
    sigma: f64,
    a: f64,
    b: f64,
    rng: &mut RngStream,
) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InsufficientData(format!("need n >= 2, got {n}")));
    }
    if !(sigma > 0.0) || !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "need sigma > 0 and a < b, got (sigma={sigma}, a={a}, b={b})"
        )));
    }
    let mut y = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    for _ in 0..n {
        let xi = sample_uniform(a, b, rng)?;
        x.push(xi);
        y.push(beta0 + beta1 * xi + sigma * sample_standard_normal(rng));
    }
    Dataset::new(y, x, vec!["x".into()])
}

/// Mean response of the nonlinear benchmark model:
/// |4 x1|^(3 x4) + 5 x2 + (2 x3)^x5.
pub fn nonlinear_mean(row: &[f64]) -> f64 {
    (4.0 * row[0]).abs().powf(3.0 * row[3]) + 5.0 * row[1] + (2.0 * row[2]).powf(row[4])
}

fn draw_nonlinear_covariates(rng: &mut RngStream, row: &mut [f64]) {
    // x1 ~ U[0,6] and x2 ~ N(0,1), both rounded to the nearest integer;
    // x3 ~ Bernoulli(0.5); x4 ~ U[0,1] and x5 ~ U[1,2], rounded to the
    // first decimal
    row[0] = sample_uniform(0.0, 6.0, rng).expect("fixed bounds").round();
    row[1] = sample_standard_normal(rng).round();
    row[2] = sample_bernoulli(0.5, rng).expect("fixed p");
    row[3] = (sample_uniform(0.0, 1.0, rng).expect("fixed bounds") * 10.0).round() / 10.0;
    row[4] = (sample_uniform(1.0, 2.0, rng).expect("fixed bounds") * 10.0).round() / 10.0;
}

/// Nonlinear benchmark data with covariates x1..x5 and Gaussian noise.
pub fn gen_nonlinear(n: usize, noise_sd: f64, rng: &mut RngStream) -> Result<Dataset> {
    if n < 1 {
        return Err(Error::InsufficientData("need n >= 1".into()));
    }
    if !(noise_sd > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise_sd must be > 0, got {noise_sd}"
        )));
    }
    let mut y = Vec::with_capacity(n);
    let mut flat = Vec::with_capacity(n * 5);
    let mut row = [0.0f64; 5];
    for _ in 0..n {
        draw_nonlinear_covariates(rng, &mut row);
        flat.extend_from_slice(&row);
        y.push(nonlinear_mean(&row) + noise_sd * sample_standard_normal(rng));
    }
    Dataset::new(y, flat, (1..=5).map(|i| format!("x{i}")).collect())
}

/// Two-sample truth: the test covariate is Bernoulli(1/2).
#[derive(Debug, Clone, Copy)]
pub struct TwoSampleTruth {
    pub beta0: f64,
    pub beta1: f64,
    pub sigma: f64,
}

impl TruthModel for TwoSampleTruth {
    fn dim(&self) -> usize {
        1
    }
    fn draw(&self, rng: &mut RngStream, row: &mut [f64]) -> f64 {
        let x = if rng.next_f64() < 0.5 { 0.0 } else { 1.0 };
        row[0] = x;
        self.beta0 + self.beta1 * x + self.sigma * sample_standard_normal(rng)
    }
}

/// Simple-regression truth with a uniform covariate.
#[derive(Debug, Clone, Copy)]
pub struct LinearUniformTruth {
    pub beta0: f64,
    pub beta1: f64,
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
}

impl TruthModel for LinearUniformTruth {
    fn dim(&self) -> usize {
        1
    }
    fn draw(&self, rng: &mut RngStream, row: &mut [f64]) -> f64 {
        let x = self.a + (self.b - self.a) * rng.next_f64();
        row[0] = x;
        self.beta0 + self.beta1 * x + self.sigma * sample_standard_normal(rng)
    }
}

/// Nonlinear benchmark truth.
#[derive(Debug, Clone, Copy)]
pub struct NonlinearTruth {
    pub noise_sd: f64,
}

impl TruthModel for NonlinearTruth {
    fn dim(&self) -> usize {
        5
    }
    fn draw(&self, rng: &mut RngStream, row: &mut [f64]) -> f64 {
        draw_nonlinear_covariates(rng, row);
        nonlinear_mean(row) + self.noise_sd * sample_standard_normal(rng)
    }
}

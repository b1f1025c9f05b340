//! Prediction model fitters: OLS and least-squares gradient boosting.

mod gbm;
mod ols;

pub use gbm::{fit_gbm, fit_gbm_rows, GbmFit, GbmHyperparams, Node};
pub use ols::{fit_ols, fit_ols_rows, OlsFit};

use crate::data::Dataset;
use crate::error::Result;

/// A fitted model: a deterministic map from a full covariate row of the
/// originating dataset to a prediction.
pub trait Prediction: Send + Sync {
    fn predict(&self, row: &[f64]) -> f64;
}

/// Fits a model family on a row subset using the named covariates. An
/// empty covariate list is the intercept-only (mean) model.
pub trait Fitter: Sync {
    fn fit(
        &self,
        data: &Dataset,
        rows: &[usize],
        covariates: &[String],
    ) -> Result<Box<dyn Prediction>>;
}

/// OLS family.
#[derive(Debug, Clone, Copy, Default)]
pub struct OlsFitter;

impl Fitter for OlsFitter {
    fn fit(
        &self,
        data: &Dataset,
        rows: &[usize],
        covariates: &[String],
    ) -> Result<Box<dyn Prediction>> {
        Ok(Box::new(fit_ols_rows(data, rows, covariates)?))
    }
}

/// Gradient-boosting family with fixed hyperparameters.
#[derive(Debug, Clone, Default)]
pub struct GbmFitter {
    pub hp: GbmHyperparams,
}

impl Fitter for GbmFitter {
    fn fit(
        &self,
        data: &Dataset,
        rows: &[usize],
        covariates: &[String],
    ) -> Result<Box<dyn Prediction>> {
        Ok(Box::new(fit_gbm_rows(data, rows, covariates, &self.hp)?))
    }
}

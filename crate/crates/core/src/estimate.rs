//! The estimate record returned by every PIP estimator.

use crate::error::{Error, Result};

/// Auxiliary settings recorded with an estimate. Only the fields that
/// apply to the producing method are set.
#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct EstimateMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_train: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_test: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_mc: Option<u64>,
}

/// A point estimate of a PIP in [0, 1], with optional quantile bounds.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PipEstimate {
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub meta: EstimateMeta,
}

impl PipEstimate {
    pub fn new(estimate: f64, method: impl Into<String>) -> Result<Self> {
        if !(0.0..=1.0).contains(&estimate) {
            return Err(Error::InvalidArgument(format!(
                "PIP estimate {estimate} outside [0, 1]"
            )));
        }
        Ok(PipEstimate {
            estimate,
            lower: None,
            upper: None,
            method: method.into(),
            seed: None,
            meta: EstimateMeta::default(),
        })
    }

    /// Attach quantile bounds; enforces 0 <= lower <= estimate <= upper <= 1.
    pub fn with_bounds(mut self, lower: f64, upper: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lower)
            || !(0.0..=1.0).contains(&upper)
            || lower > self.estimate
            || self.estimate > upper
        {
            return Err(Error::InvalidArgument(format!(
                "bounds ({lower}, {upper}) inconsistent with estimate {}",
                self.estimate
            )));
        }
        self.lower = Some(lower);
        self.upper = Some(upper);
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_meta(mut self, meta: EstimateMeta) -> Self {
        self.meta = meta;
        self
    }
}

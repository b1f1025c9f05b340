//! Loss functions and the pairwise improvement indicator.

use crate::error::{Error, Result};

/// How equal losses are scored by the improvement indicator.
///
/// `Strict` counts a tie as no improvement, matching the strict inequality
/// used by the resampling estimators. `HalfCredit` awards 0.5, the
/// convention for indistinguishable models; it matters for discrete
/// outcomes where exact ties are common.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    #[default]
    Strict,
    HalfCredit,
}

/// A pointwise prediction loss. Implementations must be nonnegative and
/// deterministic.
pub trait LossFunction: Sync {
    fn eval(&self, prediction: f64, observed: f64) -> f64;
}

/// The squared error loss `(prediction - observed)^2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredError;

impl LossFunction for SquaredError {
    #[inline]
    fn eval(&self, prediction: f64, observed: f64) -> f64 {
        let r = prediction - observed;
        r * r
    }
}

/// Squared error with argument validation.
pub fn squared_loss(prediction: f64, observed: f64) -> Result<f64> {
    if !prediction.is_finite() || !observed.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "squared_loss requires finite inputs, got ({prediction}, {observed})"
        )));
    }
    Ok(SquaredError.eval(prediction, observed))
}

/// 1 if the full model's loss is strictly smaller, 0 if strictly larger,
/// ties scored by `policy`.
pub fn improvement_indicator(loss_full: f64, loss_null: f64, policy: TiePolicy) -> Result<f64> {
    if !loss_full.is_finite() || !loss_null.is_finite() || loss_full < 0.0 || loss_null < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "improvement_indicator requires finite nonnegative losses, got ({loss_full}, {loss_null})"
        )));
    }
    Ok(indicator_unchecked(loss_full, loss_null, policy))
}

#[inline]
pub(crate) fn indicator_unchecked(loss_full: f64, loss_null: f64, policy: TiePolicy) -> f64 {
    if loss_full < loss_null {
        1.0
    } else if loss_full > loss_null {
        0.0
    } else {
        match policy {
            TiePolicy::Strict => 0.0,
            TiePolicy::HalfCredit => 0.5,
        }
    }
}

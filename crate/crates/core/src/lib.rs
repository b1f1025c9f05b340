//! Estimators for the probability of improved prediction (PIP): the
//! probability that one prediction model beats another under a loss
//! function on a fresh observation.
//!
//! The crate provides
//! - closed-form and Monte-Carlo plug-in estimators for the two-sample and
//!   simple-linear-regression settings ([`plugin`]),
//! - nonparametric split-sample and (repeated) k-fold cross-validation
//!   estimators over arbitrary fitters and losses ([`resampling`]),
//! - exact mappings between the PIP, p-values, MSE differences and
//!   predictive-distribution overlap ([`relations`]),
//! - OLS and a minimal least-squares gradient-boosting fitter ([`models`]),
//! - data generators and study runners for simulation and replication
//!   experiments ([`sim`]).
//!
//! All randomness flows through [`rng::RngStream`], a splittable
//! counter-based generator, so every result is reproducible for a given
//! master seed regardless of thread count.

// `!(x > 0.0)` is the NaN-rejecting form of the checks below.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// `n % 2 != 0` style parity checks read fine next to the formulas.
#![allow(clippy::manual_is_multiple_of)]

pub mod data;
pub mod dists;
pub mod error;
pub mod estimate;
pub mod loss;
pub mod models;
pub mod plugin;
pub mod relations;
pub mod resampling;
pub mod rng;
pub mod sim;

pub use data::Dataset;
pub use error::{Error, Result};
pub use estimate::{EstimateMeta, PipEstimate};
pub use loss::{improvement_indicator, squared_loss, LossFunction, SquaredError, TiePolicy};
pub use rng::RngStream;

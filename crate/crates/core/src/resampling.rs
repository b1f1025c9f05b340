//! Nonparametric PIP estimators: split-sample, k-fold cross-validation
//! and repeated k-fold cross-validation with quantile confidence bounds.
//!
//! All three work over arbitrary fitters and losses. Fold weighting is
//! 1/k times the fold means, not the pooled mean over rows; the two only
//! coincide for equal fold sizes. Repeats run as independent tasks with
//! per-repeat substreams, so results do not depend on scheduling.
//!
//! When the full model's covariates contain a 0/1 group column, folds and
//! splits are stratified per group: every training complement then keeps
//! both groups, which a balanced two-sample design needs to stay fittable.
//! The stratified assignment is driven by one label-independent
//! permutation, so relabelling the groups (x -> 1-x) leaves every fold
//! unchanged.

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{EstimateMeta, PipEstimate};
use crate::loss::{indicator_unchecked, LossFunction, TiePolicy};
use crate::models::Fitter;
use crate::rng::RngStream;

fn default_k() -> usize {
    5
}
fn default_repeats() -> usize {
    10
}
fn default_alpha() -> f64 {
    0.05
}
fn default_split_ratio() -> f64 {
    0.5
}

/// Settings shared by the resampling estimators. Omitted configuration
/// fields fall back to the defaults.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResamplingConfig {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_split_ratio")]
    pub split_ratio: f64,
    #[serde(default)]
    pub tie_policy: TiePolicy,
}

impl Default for ResamplingConfig {
    fn default() -> Self {
        ResamplingConfig {
            k: 5,
            repeats: 10,
            alpha: 0.05,
            split_ratio: 0.5,
            tie_policy: TiePolicy::Strict,
        }
    }
}

impl ResamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!(
                "k must be >= 2, got {}",
                self.k
            )));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidArgument("repeats must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "split_ratio must lie in (0,1), got {}",
                self.split_ratio
            )));
        }
        Ok(())
    }
}

/// Fold assignment for one k-fold pass.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub assignments: Vec<usize>,
    pub k: usize,
}

impl FoldPlan {
    pub fn fold_members(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn complement(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }
}

/// Deal a uniform random permutation of `0..n` round-robin into k folds.
pub fn make_folds(n: usize, k: usize, rng: &mut RngStream) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!(
            "fold count must satisfy 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let perm = rng.permutation(n);
    let mut assignments = vec![0usize; n];
    for (pos, &row) in perm.iter().enumerate() {
        assignments[row] = pos % k;
    }
    Ok(FoldPlan { assignments, k })
}

/// Stratified variant: scan one label-independent permutation and deal
/// each group's members round-robin with a per-group counter.
fn make_folds_stratified(
    data: &Dataset,
    group_col: usize,
    k: usize,
    rng: &mut RngStream,
) -> Result<FoldPlan> {
    let n = data.n();
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!(
            "fold count must satisfy 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let perm = rng.permutation(n);
    let mut assignments = vec![0usize; n];
    let mut counters = [0usize; 2];
    for &row in &perm {
        let g = if data.value(row, group_col) == 0.0 {
            0
        } else {
            1
        };
        assignments[row] = counters[g] % k;
        counters[g] += 1;
    }
    Ok(FoldPlan { assignments, k })
}

/// The stratification column, when the full covariates contain a 0/1
/// group indicator: the first binary column in the set.
fn stratify_column(data: &Dataset, full_covariates: &[String]) -> Option<usize> {
    let mut cols: Vec<usize> = full_covariates
        .iter()
        .filter_map(|name| data.column_index(name).ok())
        .collect();
    cols.sort_unstable();
    cols.into_iter().find(|&c| data.is_binary_column(c))
}

fn min_group_size(data: &Dataset, col: usize) -> usize {
    let ones = (0..data.n()).filter(|&r| data.value(r, col) == 1.0).count();
    ones.min(data.n() - ones)
}

/// Per-fold evaluation: mean improvement indicator plus the two mean
/// losses, so one pass serves both the PIP and the MSE difference.
#[derive(Debug, Clone, Copy)]
pub struct FoldOutcome {
    pub indicator_mean: f64,
    pub mse_full: f64,
    pub mse_null: f64,
}

#[allow(clippy::too_many_arguments)]
fn eval_fold(
    data: &Dataset,
    null_covariates: &[String],
    full_covariates: &[String],
    fitter: &dyn Fitter,
    loss: &dyn LossFunction,
    tie_policy: TiePolicy,
    train: &[usize],
    test: &[usize],
    context: &str,
) -> Result<FoldOutcome> {
    let fit0 = fitter
        .fit(data, train, null_covariates)
        .map_err(|e| Error::estimation_failed(format!("{context}: null model"), e))?;
    let fit1 = fitter
        .fit(data, train, full_covariates)
        .map_err(|e| Error::estimation_failed(format!("{context}: full model"), e))?;
    let mut ind = 0.0;
    let mut l1_sum = 0.0;
    let mut l0_sum = 0.0;
    for &row in test {
        let y = data.outcome(row);
        let l1 = loss.eval(fit1.predict(data.row(row)), y);
        let l0 = loss.eval(fit0.predict(data.row(row)), y);
        ind += indicator_unchecked(l1, l0, tie_policy);
        l1_sum += l1;
        l0_sum += l0;
    }
    let m = test.len() as f64;
    Ok(FoldOutcome {
        indicator_mean: ind / m,
        mse_full: l1_sum / m,
        mse_null: l0_sum / m,
    })
}

// ---------------------------------------------------------------------------
// Split sample
// ---------------------------------------------------------------------------

/// Split-sample estimate with the mean losses on the test half.
pub fn split_sample_detail(
    data: &Dataset,
    null_covariates: &[String],
    full_covariates: &[String],
    fitter: &dyn Fitter,
    loss: &dyn LossFunction,
    cfg: &ResamplingConfig,
    rng: &mut RngStream,
) -> Result<(PipEstimate, FoldOutcome)> {
    cfg.validate()?;
    let n = data.n();
    let perm = rng.permutation(n);
    let (train, test) = match stratify_column(data, full_covariates) {
        Some(col) if min_group_size(data, col) >= 2 => {
            // the first floor(n_g * ratio) encountered members of each
            // group train, the rest test
            let zeros = (0..n).filter(|&r| data.value(r, col) == 0.0).count();
            let want = [
                (zeros as f64 * cfg.split_ratio).floor() as usize,
                ((n - zeros) as f64 * cfg.split_ratio).floor() as usize,
            ];
            let mut taken = [0usize; 2];
            let mut train = Vec::new();
            let mut test = Vec::new();
            for &row in &perm {
                let g = if data.value(row, col) == 0.0 { 0 } else { 1 };
                if taken[g] < want[g] {
                    train.push(row);
                    taken[g] += 1;
                } else {
                    test.push(row);
                }
            }
            (train, test)
        }
        _ => {
            let n_train = (n as f64 * cfg.split_ratio).floor() as usize;
            (perm[..n_train].to_vec(), perm[n_train..].to_vec())
        }
    };
    if train.is_empty() || test.is_empty() {
        return Err(Error::InsufficientData(
            "split leaves an empty train or test half".into(),
        ));
    }
    let outcome = eval_fold(
        data,
        null_covariates,
        full_covariates,
        fitter,
        loss,
        cfg.tie_policy,
        &train,
        &test,
        "split sample",
    )?;
    let estimate =
        PipEstimate::new(outcome.indicator_mean, "split_sample")?.with_meta(EstimateMeta {
            n_train: Some(train.len()),
            n_test: Some(test.len()),
            ..EstimateMeta::default()
        });
    Ok((estimate, outcome))
}

/// Split-sample PIP: one random half/half split, fit on the training
/// half, mean improvement indicator over the test half.
pub fn split_sample_pip(
    data: &Dataset,
    null_covariates: &[String],
    full_covariates: &[String],
    fitter: &dyn Fitter,
    loss: &dyn LossFunction,
    cfg: &ResamplingConfig,
    rng: &mut RngStream,
) -> Result<PipEstimate> {
    split_sample_detail(
        data,
        null_covariates,
        full_covariates,
        fitter,
        loss,
        cfg,
        rng,
    )
    .map(|(e, _)| e)
}

// ---------------------------------------------------------------------------
// k-fold
// ---------------------------------------------------------------------------

/// One k-fold pass returning the fold outcomes in fold order.
#[allow(clippy::too_many_arguments)]
pub fn kfold_outcomes(
    data: &Dataset,
    null_covariates: &[String],
    full_covariates: &[String],
    fitter: &dyn Fitter,
    loss: &dyn LossFunction,
    k: usize,
    tie_policy: TiePolicy,
    rng: &mut RngStream,
) -> Result<Vec<FoldOutcome>> {
    let plan = match stratify_column(data, full_covariates) {
        Some(col) if k <= min_group_size(data, col) => make_folds_stratified(data, col, k, rng)?,
        _ => make_folds(data.n(), k, rng)?,
    };
    (0..k)
        .map(|j| {
            eval_fold(
                data,
                null_covariates,
                full_covariates,
                fitter,
                loss,
                tie_policy,
                &plan.complement(j),
                &plan.fold_members(j),
                &format!("fold {j}"),
            )
        })
        .collect()
}

/// k-fold cross-validation PIP: the unweighted average of the k fold
/// means.
#[allow(clippy::too_many_arguments)]
pub fn kfold_pip(
    data: &Dataset,
    null_covariates: &[String],
    full_covariates: &[String],
    fitter: &dyn Fitter,
    loss: &dyn LossFunction,
    k: usize,
    tie_policy: TiePolicy,
    rng: &mut RngStream,
) -> Result<PipEstimate> {
    let outcomes = kfold_outcomes(
        data,
        null_covariates,
        full_covariates,
        fitter,
        loss,
        k,
        tie_policy,
        rng,
    )?;
    let estimate = outcomes.iter().map(|o| o.indicator_mean).sum::<f64>() / k as f64;
    Ok(PipEstimate::new(estimate, "cv")?.with_meta(EstimateMeta {
        k: Some(k),
        ..EstimateMeta::default()
    }))
}

/// MSE(full) - MSE(null) from one k-fold pass, fold-mean weighted like
/// the PIP.
pub fn kfold_delta_mse(outcomes: &[FoldOutcome]) -> f64 {
    outcomes
        .iter()
        .map(|o| o.mse_full - o.mse_null)
        .sum::<f64>()
        / outcomes.len() as f64
}

// ---------------------------------------------------------------------------
// Repeated k-fold
// ---------------------------------------------------------------------------

/// Repeated k-fold estimate together with the repeat-level k-fold PIPs
/// and MSE differences (in repeat order).
pub fn repeated_kfold_detail(
    data: &Dataset,
    null_covariates: &[String],
    full_covariates: &[String],
    fitter: &dyn Fitter,
    loss: &dyn LossFunction,
    cfg: &ResamplingConfig,
    rng: &RngStream,
) -> Result<(PipEstimate, Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let per_repeat: Vec<Result<(f64, f64)>> = (0..cfg.repeats)
        .into_par_iter()
        .map(|m| {
            let mut stream = rng.substream(m as u64);
            let outcomes = kfold_outcomes(
                data,
                null_covariates,
                full_covariates,
                fitter,
                loss,
                cfg.k,
                cfg.tie_policy,
                &mut stream,
            )
            .map_err(|e| Error::estimation_failed(format!("repeat {m}"), e))?;
            let pip = outcomes.iter().map(|o| o.indicator_mean).sum::<f64>() / cfg.k as f64;
            Ok((pip, kfold_delta_mse(&outcomes)))
        })
        .collect();

    let mut pips = Vec::with_capacity(cfg.repeats);
    let mut dmses = Vec::with_capacity(cfg.repeats);
    for r in per_repeat {
        let (p, d) = r?;
        pips.push(p);
        dmses.push(d);
    }

    let estimate = pips.iter().sum::<f64>() / cfg.repeats as f64;
    let mut sorted = pips.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Nearest-rank quantiles of few repeats cannot always bracket the
    // mean for extreme spreads; clamp so the bound invariant holds.
    let lower = nearest_rank(&sorted, cfg.alpha).min(estimate);
    let upper = nearest_rank(&sorted, 1.0 - cfg.alpha).max(estimate);

    let est = PipEstimate::new(estimate, "repeated_cv")?
        .with_bounds(lower, upper)?
        .with_meta(EstimateMeta {
            k: Some(cfg.k),
            repeats: Some(cfg.repeats),
            ..EstimateMeta::default()
        });
    Ok((est, pips, dmses))
}

/// Repeated k-fold CV PIP: mean of the M k-fold estimates with
/// nearest-rank alpha and (1 - alpha) quantile bounds.
pub fn repeated_kfold_pip(
    data: &Dataset,
    null_covariates: &[String],
    full_covariates: &[String],
    fitter: &dyn Fitter,
    loss: &dyn LossFunction,
    cfg: &ResamplingConfig,
    rng: &RngStream,
) -> Result<PipEstimate> {
    repeated_kfold_detail(
        data,
        null_covariates,
        full_covariates,
        fitter,
        loss,
        cfg,
        rng,
    )
    .map(|(e, _, _)| e)
}

/// Nearest-rank quantile of pre-sorted values: the ceil(q m)-th order
/// statistic.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let m = sorted.len();
    let rank = (q * m as f64).ceil() as usize;
    sorted[rank.clamp(1, m) - 1]
}

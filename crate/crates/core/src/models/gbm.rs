//! Minimal least-squares gradient boosting with depth-limited trees.
//!
//! Stagewise: start at the training outcome mean; each round fits one
//! regression tree to the current residuals by greedy exact SSE-reduction
//! splits and adds `shrinkage` times its predictions. All rows are used
//! every round (no subsampling). Split thresholds are midpoints of
//! consecutive distinct sorted values; ties in reduction break to the
//! lowest column index, then the smallest threshold. When no split
//! satisfies the node-size minimum the stage degenerates to a single leaf
//! holding the residual mean, which keeps the tree count exact and the
//! training MSE nonincreasing.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::models::Prediction;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GbmHyperparams {
    pub n_trees: usize,
    pub interaction_depth: usize,
    pub shrinkage: f64,
    pub min_obs_per_node: usize,
}

impl Default for GbmHyperparams {
    fn default() -> Self {
        GbmHyperparams {
            n_trees: 50,
            interaction_depth: 2,
            shrinkage: 0.1,
            min_obs_per_node: 2,
        }
    }
}

impl GbmHyperparams {
    fn validate(&self) -> Result<()> {
        if self.n_trees == 0
            || self.interaction_depth == 0
            || self.min_obs_per_node == 0
            || !(self.shrinkage > 0.0 && self.shrinkage <= 1.0)
        {
            return Err(Error::InvalidArgument(format!(
                "invalid boosting hyperparameters: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    Leaf(f64),
    Split {
        /// Dataset column index.
        col: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn eval(&self, row: &[f64]) -> f64 {
        match self {
            Node::Leaf(v) => *v,
            Node::Split {
                col,
                threshold,
                left,
                right,
            } => {
                if row[*col] < *threshold {
                    left.eval(row)
                } else {
                    right.eval(row)
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GbmFit {
    pub trees: Vec<Node>,
    pub shrinkage: f64,
    pub initial_prediction: f64,
}

impl GbmFit {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut y = self.initial_prediction;
        for tree in &self.trees {
            y += self.shrinkage * tree.eval(row);
        }
        y
    }
}

impl Prediction for GbmFit {
    fn predict(&self, row: &[f64]) -> f64 {
        self.predict_row(row)
    }
}

pub fn fit_gbm(data: &Dataset, covariates: &[String], hp: &GbmHyperparams) -> Result<GbmFit> {
    let rows: Vec<usize> = (0..data.n()).collect();
    fit_gbm_rows(data, &rows, covariates, hp)
}

pub fn fit_gbm_rows(
    data: &Dataset,
    rows: &[usize],
    covariates: &[String],
    hp: &GbmHyperparams,
) -> Result<GbmFit> {
    hp.validate()?;
    let cols: Vec<usize> = covariates
        .iter()
        .map(|name| data.column_index(name))
        .collect::<Result<_>>()?;
    let n = rows.len();
    if n < 2 * hp.min_obs_per_node {
        return Err(Error::InsufficientData(format!(
            "boosting needs n >= {}, got {n}",
            2 * hp.min_obs_per_node
        )));
    }

    let initial = rows.iter().map(|&r| data.outcome(r)).sum::<f64>() / n as f64;
    let mut residuals: Vec<f64> = rows.iter().map(|&r| data.outcome(r) - initial).collect();
    // Local row ids 0..n map into `rows`; trees store dataset columns.
    let local: Vec<usize> = (0..n).collect();

    let mut trees = Vec::with_capacity(hp.n_trees);
    for _ in 0..hp.n_trees {
        let tree = build_node(data, rows, &cols, &residuals, &local, 0, hp);
        for (i, r) in residuals.iter_mut().enumerate() {
            *r -= hp.shrinkage * tree.eval(data.row(rows[i]));
        }
        trees.push(tree);
    }

    Ok(GbmFit {
        trees,
        shrinkage: hp.shrinkage,
        initial_prediction: initial,
    })
}

fn build_node(
    data: &Dataset,
    rows: &[usize],
    cols: &[usize],
    residuals: &[f64],
    members: &[usize],
    depth: usize,
    hp: &GbmHyperparams,
) -> Node {
    let sum: f64 = members.iter().map(|&i| residuals[i]).sum();
    let mean = sum / members.len() as f64;
    if depth >= hp.interaction_depth || members.len() < 2 * hp.min_obs_per_node {
        return Node::Leaf(mean);
    }
    match best_split(data, rows, cols, residuals, members, hp.min_obs_per_node) {
        None => Node::Leaf(mean),
        Some(split) => {
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for &i in members {
                if data.value(rows[i], split.col) < split.threshold {
                    left.push(i);
                } else {
                    right.push(i);
                }
            }
            Node::Split {
                col: split.col,
                threshold: split.threshold,
                left: Box::new(build_node(
                    data,
                    rows,
                    cols,
                    residuals,
                    &left,
                    depth + 1,
                    hp,
                )),
                right: Box::new(build_node(
                    data,
                    rows,
                    cols,
                    residuals,
                    &right,
                    depth + 1,
                    hp,
                )),
            }
        }
    }
}

struct Split {
    col: usize,
    threshold: f64,
    reduction: f64,
}

/// Scan every midpoint of consecutive distinct values in every column.
/// Reduction is the SSE decrease sum_L^2/n_L + sum_R^2/n_R - sum^2/n;
/// only strictly positive reductions split, and the scan order (columns
/// ascending, thresholds ascending) makes the tie-break deterministic.
fn best_split(
    data: &Dataset,
    rows: &[usize],
    cols: &[usize],
    residuals: &[f64],
    members: &[usize],
    min_obs: usize,
) -> Option<Split> {
    let n = members.len();
    let total: f64 = members.iter().map(|&i| residuals[i]).sum();
    let base = total * total / n as f64;
    let mut best: Option<Split> = None;

    let mut order: Vec<usize> = Vec::with_capacity(n);
    for &col in cols {
        order.clear();
        order.extend_from_slice(members);
        order.sort_unstable_by(|&a, &b| {
            data.value(rows[a], col)
                .partial_cmp(&data.value(rows[b], col))
                .unwrap()
                .then(a.cmp(&b))
        });

        let mut left_sum = 0.0;
        for (pos, &i) in order.iter().enumerate().take(n - 1) {
            left_sum += residuals[i];
            let v = data.value(rows[i], col);
            let v_next = data.value(rows[order[pos + 1]], col);
            if v == v_next {
                continue;
            }
            let n_left = pos + 1;
            let n_right = n - n_left;
            if n_left < min_obs || n_right < min_obs {
                continue;
            }
            let right_sum = total - left_sum;
            let reduction =
                left_sum * left_sum / n_left as f64 + right_sum * right_sum / n_right as f64 - base;
            if reduction > 0.0 && best.as_ref().is_none_or(|b| reduction > b.reduction) {
                best = Some(Split {
                    col,
                    threshold: 0.5 * (v + v_next),
                    reduction,
                });
            }
        }
    }
    best
}

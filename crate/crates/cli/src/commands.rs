//! Subcommand implementations. Every command validates its inputs before
//! computing or creating any output file.

use std::path::{Path, PathBuf};

use pipstats::estimate::PipEstimate;
use pipstats::loss::SquaredError;
use pipstats::models::{fit_ols, GbmFitter, GbmHyperparams, OlsFitter};
use pipstats::plugin::{
    pip_c1, pip_c2, pip_expected_two_sample_mc, pip_expected_uniform_mc, pip_theoretical_uniform,
    SimpleRegressionMoments, UniformCovariateParams,
};
use pipstats::relations::{
    asymptotic_scaled_log_p, delta_mse_from_pip, overlap_from_pip, pip_from_pvalue, pvalue_from_pip,
};
use pipstats::resampling::{kfold_pip, repeated_kfold_pip, split_sample_pip, ResamplingConfig};
use pipstats::sim::{
    emit_results, run_gbm_study, run_replication, run_two_sample_study, Estimator,
    NonlinearScenario, ReplicationStudySpec, StudyOptions, StudyResult, TwoSampleScenario,
    DEFAULT_MASTER_SEED,
};
use pipstats::{Dataset, Error, Result, RngStream, TiePolicy};

use crate::output::{estimate_json, render_array, JsonObject};
use crate::{MethodArg, ModelArg};

pub struct EstimateArgs {
    pub input: PathBuf,
    pub outcome: String,
    pub null_covariates: String,
    pub full_covariates: String,
    pub model: ModelArg,
    pub method: MethodArg,
    pub k: usize,
    pub repeats: usize,
    pub alpha: f64,
    pub split_ratio: f64,
    pub tie_policy: TiePolicy,
    pub n_mc: u64,
    pub seed: u64,
}

fn parse_covariates(data: &Dataset, list: &str) -> Result<Vec<String>> {
    let names: Vec<String> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    for name in &names {
        data.column_index(name)?;
    }
    Ok(names)
}

/// The plug-in methods need the simple two-model structure: an
/// intercept-only null model and exactly one full-model covariate.
fn require_simple_structure(
    method: &str,
    model: ModelArg,
    null: &[String],
    full: &[String],
) -> Result<()> {
    if model != ModelArg::Ols {
        return Err(Error::InvalidArgument(format!(
            "method {method} requires --model ols"
        )));
    }
    if !null.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "method {method} uses an intercept-only null model; --null-covariates must be empty"
        )));
    }
    if full.len() != 1 {
        return Err(Error::InvalidArgument(format!(
            "method {method} needs exactly one full-model covariate, got {}",
            full.len()
        )));
    }
    Ok(())
}

pub fn estimate(args: EstimateArgs) -> Result<()> {
    let data = Dataset::from_csv_path(&args.input, &args.outcome)?;
    let null_cov = parse_covariates(&data, &args.null_covariates)?;
    let full_cov = parse_covariates(&data, &args.full_covariates)?;
    let cfg = ResamplingConfig {
        k: args.k,
        repeats: args.repeats,
        alpha: args.alpha,
        split_ratio: args.split_ratio,
        tie_policy: args.tie_policy,
    };

    let estimate = match args.method {
        MethodArg::C1 => {
            require_simple_structure("c1", args.model, &null_cov, &full_cov)?;
            let fit = fit_ols(&data, &full_cov)?;
            let col = data.column_index(&full_cov[0])?;
            let beta1 = fit.coefficients[1];
            if beta1 == 0.0 {
                // indistinguishable models, exactly one half
                PipEstimate::new(0.5, "c1")?
            } else if data.is_binary_column(col) {
                pip_c1(beta1, fit.residual_sd()).map_err(|e| Error::estimation_failed("c1", e))?
            } else {
                // continuous covariate: the same plug-in evaluated as the
                // quadrature form over the observed range
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for r in 0..data.n() {
                    lo = lo.min(data.value(r, col));
                    hi = hi.max(data.value(r, col));
                }
                let params = UniformCovariateParams::new(
                    fit.coefficients[0],
                    beta1,
                    fit.residual_sd(),
                    lo,
                    hi,
                )?;
                let mut e = pip_theoretical_uniform(&params, 64)
                    .map_err(|e| Error::estimation_failed("c1", e))?;
                e.method = "c1".into();
                e
            }
        }
        MethodArg::C2 => {
            require_simple_structure("c2", args.model, &null_cov, &full_cov)?;
            let col = data.column_index(&full_cov[0])?;
            if !data.is_binary_column(col) {
                return Err(Error::NonBinaryCovariate(full_cov[0].clone()));
            }
            let fit0 = fit_ols(&data, &[])?;
            let fit1 = fit_ols(&data, &full_cov)?;
            pip_c2(&data, &fit0, &fit1).map_err(|e| Error::estimation_failed("c2", e))?
        }
        MethodArg::Expected => {
            require_simple_structure("expected", args.model, &null_cov, &full_cov)?;
            let fit = fit_ols(&data, &full_cov)?;
            let col = data.column_index(&full_cov[0])?;
            let rng = RngStream::new(args.seed, 0);
            if data.is_binary_column(col) {
                pip_expected_two_sample_mc(
                    fit.coefficients[1],
                    fit.residual_sd(),
                    data.n(),
                    args.n_mc,
                    args.tie_policy,
                    &rng,
                )
                .map_err(|e| Error::estimation_failed("expected", e))?
            } else {
                // continuous covariate: uniform plug-in over the observed range
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for r in 0..data.n() {
                    lo = lo.min(data.value(r, col));
                    hi = hi.max(data.value(r, col));
                }
                let params = UniformCovariateParams::new(
                    fit.coefficients[0],
                    fit.coefficients[1],
                    fit.residual_sd(),
                    lo,
                    hi,
                )?;
                let moments = SimpleRegressionMoments::from_fit(&fit, &data)?;
                pip_expected_uniform_mc(&params, &moments, args.n_mc, args.tie_policy, &rng)
                    .map_err(|e| Error::estimation_failed("expected", e))?
            }
        }
        MethodArg::Split => {
            cfg.validate()?;
            let mut rng = RngStream::new(args.seed, 0);
            run_resampling(&data, &null_cov, &full_cov, args.model, |fitter| {
                split_sample_pip(
                    &data,
                    &null_cov,
                    &full_cov,
                    fitter,
                    &SquaredError,
                    &cfg,
                    &mut rng,
                )
            })?
        }
        MethodArg::Cv => {
            cfg.validate()?;
            if args.k > data.n() {
                return Err(Error::InvalidArgument(format!(
                    "k = {} exceeds n = {}",
                    args.k,
                    data.n()
                )));
            }
            let mut rng = RngStream::new(args.seed, 0);
            run_resampling(&data, &null_cov, &full_cov, args.model, |fitter| {
                kfold_pip(
                    &data,
                    &null_cov,
                    &full_cov,
                    fitter,
                    &SquaredError,
                    args.k,
                    args.tie_policy,
                    &mut rng,
                )
            })?
        }
        MethodArg::Repcv => {
            cfg.validate()?;
            if args.k > data.n() {
                return Err(Error::InvalidArgument(format!(
                    "k = {} exceeds n = {}",
                    args.k,
                    data.n()
                )));
            }
            let rng = RngStream::new(args.seed, 0);
            run_resampling(&data, &null_cov, &full_cov, args.model, |fitter| {
                repeated_kfold_pip(
                    &data,
                    &null_cov,
                    &full_cov,
                    fitter,
                    &SquaredError,
                    &cfg,
                    &rng,
                )
            })?
        }
    };

    println!("{}", estimate_json(&estimate.with_seed(args.seed)).render());
    Ok(())
}

fn run_resampling<F>(
    _data: &Dataset,
    _null: &[String],
    _full: &[String],
    model: ModelArg,
    body: F,
) -> Result<PipEstimate>
where
    F: FnOnce(&dyn pipstats::models::Fitter) -> Result<PipEstimate>,
{
    match model {
        ModelArg::Ols => body(&OlsFitter),
        ModelArg::Gbm => body(&GbmFitter {
            hp: GbmHyperparams::default(),
        }),
    }
}

pub fn relate(n: usize, p: Option<f64>, pip: Option<f64>, sigma: Option<f64>) -> Result<()> {
    let (pip, p_value) = match (p, pip) {
        (Some(p), None) => (pip_from_pvalue(p, n)?, p),
        (None, Some(pip)) => (pip, pvalue_from_pip(pip, n)?),
        _ => {
            return Err(Error::InvalidArgument(
                "provide exactly one of --p or --pip".into(),
            ))
        }
    };
    let scaled_log_p = if pip < 1.0 {
        asymptotic_scaled_log_p(pip)?
    } else {
        f64::NEG_INFINITY
    };
    let overlap = overlap_from_pip(pip, n)?;
    let mut obj = JsonObject::new()
        .number("pip", pip)
        .number("p_value", p_value)
        .number("scaled_log_p_limit", scaled_log_p)
        .number("overlap", overlap);
    if let Some(s) = sigma {
        obj = obj.number("delta_mse", delta_mse_from_pip(pip, s)?);
    }
    println!("{}", obj.render());
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn default_estimators() -> Vec<Estimator> {
    vec![Estimator::C1, Estimator::C2, Estimator::RepeatedCv]
}

#[derive(serde::Deserialize)]
#[serde(tag = "study", rename_all = "snake_case", deny_unknown_fields)]
enum SimulateConfig {
    TwoSample {
        scenarios: Vec<TwoSampleScenario>,
        #[serde(default = "default_estimators")]
        estimators: Vec<Estimator>,
        #[serde(default)]
        resampling: ResamplingConfig,
        #[serde(default)]
        n_mc: Option<u64>,
        #[serde(default)]
        conditional_oracle_draws: Option<u64>,
    },
    NonlinearGbm {
        scenarios: Vec<NonlinearScenario>,
        #[serde(default)]
        resampling: ResamplingConfig,
        #[serde(default)]
        gbm: GbmHyperparams,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn rates_json(row: &pipstats::sim::DecisionRow) -> String {
    let rates: Vec<String> = row
        .rates
        .iter()
        .map(|r| {
            JsonObject::new()
                .string("rule", &r.rule)
                .number("percent", r.percent)
                .render()
        })
        .collect();
    let mut obj = JsonObject::new()
        .string("scenario", &row.scenario)
        .integer("n", row.n as u64);
    obj = if row.effect.is_nan() {
        obj.null("effect")
    } else {
        obj.number("effect", row.effect)
    };
    obj.integer("runs", row.runs as u64)
        .raw("rates", render_array(rates))
        .render()
}

fn print_summary(rows: &[(String, pipstats::sim::DecisionRow)]) {
    println!(
        "{:<30} {:>6} {:>8} {:>6}  rates",
        "scenario", "n", "effect", "runs"
    );
    for (_, row) in rows {
        let rates: Vec<String> = row
            .rates
            .iter()
            .map(|r| format!("{}={:.2}", r.rule, r.percent))
            .collect();
        let effect = if row.effect.is_nan() {
            "-".to_string()
        } else {
            format!("{}", row.effect)
        };
        println!(
            "{:<30} {:>6} {:>8} {:>6}  {}",
            row.scenario,
            row.n,
            effect,
            row.runs,
            rates.join(" ")
        );
    }
}

pub fn simulate(config_path: &Path, out_dir: &Path) -> Result<()> {
    let config: SimulateConfig = read_json(config_path)?;

    // run everything before touching the output directory
    let results: Vec<(String, f64, StudyResult)> = match &config {
        SimulateConfig::TwoSample {
            scenarios,
            estimators,
            resampling,
            n_mc,
            conditional_oracle_draws,
        } => {
            let opts = StudyOptions {
                resampling: resampling.clone(),
                n_mc: n_mc.unwrap_or(pipstats::plugin::DEFAULT_N_MC),
                conditional_oracle_draws: *conditional_oracle_draws,
            };
            scenarios
                .iter()
                .map(|s| {
                    let res = run_two_sample_study(s, estimators, &opts)?;
                    Ok((format!("two_sample_n{}_beta{}", s.n, s.beta1), s.beta1, res))
                })
                .collect::<Result<_>>()?
        }
        SimulateConfig::NonlinearGbm {
            scenarios,
            resampling,
            gbm,
        } => {
            let opts = StudyOptions {
                resampling: resampling.clone(),
                ..Default::default()
            };
            scenarios
                .iter()
                .map(|s| {
                    let res = run_gbm_study(s, &opts, gbm)?;
                    Ok((format!("nonlinear_n{}", s.n), f64::NAN, res))
                })
                .collect::<Result<_>>()?
        }
    };

    std::fs::create_dir_all(out_dir)?;
    let mut decision_rows = Vec::new();
    for (label, beta1, result) in &results {
        let csv_path = out_dir.join(format!("{label}.csv"));
        let mut file = std::fs::File::create(&csv_path)?;
        emit_results(
            &result.decisions.scenario,
            result.decisions.n,
            *beta1,
            &result.records,
            &mut file,
        )?;
        decision_rows.push((label.clone(), result.decisions.clone()));
    }
    let decisions_json = render_array(decision_rows.iter().map(|(_, r)| rates_json(r)).collect());
    std::fs::write(
        out_dir.join("decisions.json"),
        format!("{{\"rows\": {decisions_json}}}\n"),
    )?;

    print_summary(&decision_rows);
    println!("results written to {}", out_dir.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// replicate
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ReplicateConfig {
    studies: Vec<ReplicationStudySpec>,
    #[serde(default)]
    resampling: ResamplingConfig,
    #[serde(default = "default_replication_seed")]
    master_seed: u64,
}

fn default_replication_seed() -> u64 {
    DEFAULT_MASTER_SEED
}

pub fn replicate(config_path: &Path) -> Result<()> {
    let config: ReplicateConfig = read_json(config_path)?;
    let results = run_replication(&config.studies, &config.resampling, config.master_seed)?;
    let items = results
        .iter()
        .map(|r| {
            JsonObject::new()
                .string("study", &r.study)
                .number("p_value", r.p_value)
                .number("pip", r.pip.estimate)
                .maybe_number("lower", r.pip.lower)
                .maybe_number("upper", r.pip.upper)
                .render()
        })
        .collect();
    println!("{}", render_array(items));
    Ok(())
}

//! Plug-in estimators of the theoretical, conditional and expected PIP.
//!
//! The closed forms cover the two-sample setting (intercept-only versus
//! binary-group linear model) and simple linear regression with a uniform
//! covariate. The expected-PIP estimators sample the exact bivariate
//! normal (mixture) law of the two prediction errors. Everything more
//! general goes through the empirical conditional-PIP oracle, which just
//! draws fresh observations from a truth model and counts improvements.
//!
//! The C1 and C2 estimators double as plug-in estimators of both the
//! theoretical and the conditional PIP; the two plug-in estimates
//! coincide, so one implementation carries both interpretations.

use rayon::prelude::*;

use crate::data::Dataset;
use crate::dists::{
    integrate_gauss_legendre, sample_bivariate_normal, sample_uniform, std_normal_cdf,
    BivariateGaussian,
};
use crate::error::{Error, Result};
use crate::estimate::{EstimateMeta, PipEstimate};
use crate::loss::{indicator_unchecked, LossFunction, TiePolicy};
use crate::models::{OlsFit, Prediction};
use crate::rng::RngStream;

/// Monte-Carlo draws are dealt to fixed-size chunks, each with its own
/// substream, so totals do not depend on how chunks are scheduled.
const MC_CHUNK: u64 = 16_384;

/// Default number of Monte-Carlo draws for expected-PIP estimators.
pub const DEFAULT_N_MC: u64 = 100_000;

/// True parameters of the balanced two-sample model: outcome is
/// N(beta0 + beta1 x, sigma^2) with x a 0/1 group indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSampleParams {
    pub beta0: f64,
    pub beta1: f64,
    pub sigma: f64,
}

impl TwoSampleParams {
    pub fn new(beta0: f64, beta1: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() || !beta0.is_finite() || !beta1.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "two-sample params need finite betas and sigma > 0, got ({beta0}, {beta1}, {sigma})"
            )));
        }
        Ok(TwoSampleParams {
            beta0,
            beta1,
            sigma,
        })
    }
}

/// Simple linear regression with covariate uniform on [a, b].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformCovariateParams {
    pub beta0: f64,
    pub beta1: f64,
    pub sigma: f64,
    pub a: f64,
    pub b: f64,
}

impl UniformCovariateParams {
    pub fn new(beta0: f64, beta1: f64, sigma: f64, a: f64, b: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(a < b) || ![beta0, beta1, sigma, a, b].iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "uniform-covariate params need sigma > 0 and a < b, got (sigma={sigma}, a={a}, b={b})"
            )));
        }
        Ok(UniformCovariateParams {
            beta0,
            beta1,
            sigma,
            a,
            b,
        })
    }
}

/// Coefficient second moments of a fitted simple regression, the inputs
/// the expected-PIP law needs beyond the residual scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleRegressionMoments {
    pub var_intercept: f64,
    pub var_slope: f64,
    pub cov_intercept_slope: f64,
    pub x_bar: f64,
}

impl SimpleRegressionMoments {
    pub fn new(
        var_intercept: f64,
        var_slope: f64,
        cov_intercept_slope: f64,
        x_bar: f64,
    ) -> Result<Self> {
        if var_intercept < 0.0 || var_slope < 0.0 || !x_bar.is_finite() {
            return Err(Error::InvalidCovariance(
                "coefficient variances must be nonnegative".into(),
            ));
        }
        Ok(SimpleRegressionMoments {
            var_intercept,
            var_slope,
            cov_intercept_slope,
            x_bar,
        })
    }

    /// Extract the moments from a fitted simple regression.
    pub fn from_fit(fit: &OlsFit, data: &Dataset) -> Result<Self> {
        if fit.coefficients.len() != 2 {
            return Err(Error::InvalidArgument(
                "expected a simple (one covariate) regression fit".into(),
            ));
        }
        let col = data.column_index(&fit.covariate_names[0])?;
        let x_bar = (0..data.n()).map(|r| data.value(r, col)).sum::<f64>() / data.n() as f64;
        SimpleRegressionMoments::new(
            fit.coef_covariance[0][0],
            fit.coef_covariance[1][1],
            fit.coef_covariance[0][1],
            x_bar,
        )
    }
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// C1: the parametric plug-in Phi(|b1| / (4 sigma)).
pub fn pip_c1(beta1_hat: f64, sigma_hat: f64) -> Result<PipEstimate> {
    if !(sigma_hat > 0.0) || !sigma_hat.is_finite() || !beta1_hat.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "C1 needs finite beta1 and sigma > 0, got ({beta1_hat}, {sigma_hat})"
        )));
    }
    PipEstimate::new(std_normal_cdf(beta1_hat.abs() / (4.0 * sigma_hat)), "c1")
}

/// C2: the empirical-CDF plug-in. Group-wise empirical distribution
/// functions (strict inequality) evaluated at the midpoints between the
/// competing predictions, branch chosen by the sign of the slope; a zero
/// slope is the indistinguishable-models case and returns exactly 0.5.
pub fn pip_c2(data: &Dataset, fit0: &OlsFit, fit1: &OlsFit) -> Result<PipEstimate> {
    if fit0.coefficients.len() != 1 || fit1.coefficients.len() != 2 {
        return Err(Error::InvalidArgument(
            "C2 expects an intercept-only null fit and a single-covariate full fit".into(),
        ));
    }
    let col = data.column_index(&fit1.covariate_names[0])?;
    if !data.is_binary_column(col) {
        return Err(Error::NonBinaryCovariate(fit1.covariate_names[0].clone()));
    }
    let b00 = fit0.coefficients[0];
    let b01 = fit1.coefficients[0];
    let b11 = fit1.coefficients[1];
    if b11 == 0.0 {
        return PipEstimate::new(0.5, "c2");
    }
    let cut0 = 0.5 * (b00 + b01);
    let cut1 = 0.5 * (b00 + b01 + b11);
    let ecdf = |group: f64, y: f64| {
        let (mut below, mut size) = (0usize, 0usize);
        for r in 0..data.n() {
            if data.value(r, col) == group {
                size += 1;
                if data.outcome(r) < y {
                    below += 1;
                }
            }
        }
        below as f64 / size as f64
    };
    let estimate = if b11 > 0.0 {
        0.5 * ecdf(0.0, cut0) + 0.5 * (1.0 - ecdf(1.0, cut1))
    } else {
        0.5 * (1.0 - ecdf(0.0, cut0)) + 0.5 * ecdf(1.0, cut1)
    };
    PipEstimate::new(estimate, "c2")
}

/// Theoretical PIP of the two-sample setting: Phi(|beta1| / (4 sigma)),
/// exactly 0.5 when the models coincide.
pub fn pip_theoretical_two_sample(p: &TwoSampleParams) -> Result<PipEstimate> {
    PipEstimate::new(
        std_normal_cdf(p.beta1.abs() / (4.0 * p.sigma)),
        "theoretical_two_sample",
    )
}

/// Theoretical PIP for the uniform-covariate simple regression: the
/// two-piece integral over [a, K] and [K, b] with K the covariate mean,
/// evaluated with `quad_points` Gauss-Legendre nodes per piece. The
/// model difference is -beta1 (x - K), so both branches integrate the
/// same normal-CDF integrand mirrored around K.
pub fn pip_theoretical_uniform(
    p: &UniformCovariateParams,
    quad_points: usize,
) -> Result<PipEstimate> {
    if quad_points == 0 {
        return Err(Error::InvalidArgument(
            "quad_points must be positive".into(),
        ));
    }
    if p.beta1 == 0.0 {
        return PipEstimate::new(0.5, "theoretical_uniform");
    }
    let k = 0.5 * (p.a + p.b);
    let density = 1.0 / (p.b - p.a);
    let diff_scaled = |x: f64| -p.beta1 * (x - k) / (2.0 * p.sigma); // (m0 - m1) / (2 sigma)
    let (lower, upper) = if p.beta1 > 0.0 {
        (
            integrate_gauss_legendre(
                |x| std_normal_cdf(diff_scaled(x)) * density,
                p.a,
                k,
                quad_points,
            ),
            integrate_gauss_legendre(
                |x| (1.0 - std_normal_cdf(diff_scaled(x))) * density,
                k,
                p.b,
                quad_points,
            ),
        )
    } else {
        (
            integrate_gauss_legendre(
                |x| (1.0 - std_normal_cdf(diff_scaled(x))) * density,
                p.a,
                k,
                quad_points,
            ),
            integrate_gauss_legendre(
                |x| std_normal_cdf(diff_scaled(x)) * density,
                k,
                p.b,
                quad_points,
            ),
        )
    };
    PipEstimate::new((lower + upper).clamp(0.0, 1.0), "theoretical_uniform")
}

// ---------------------------------------------------------------------------
// Expected PIP by Monte Carlo
// ---------------------------------------------------------------------------

fn chunked_mc<F>(n_mc: u64, rng: &RngStream, body: F) -> f64
where
    F: Fn(&mut RngStream, u64) -> f64 + Sync,
{
    let n_chunks = n_mc.div_ceil(MC_CHUNK);
    let sums: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut stream = rng.substream(chunk);
            let lo = chunk * MC_CHUNK;
            let hi = (lo + MC_CHUNK).min(n_mc);
            body(&mut stream, hi - lo)
        })
        .collect();
    sums.iter().sum::<f64>() / n_mc as f64
}

/// Expected PIP of the balanced two-sample design by sampling the exact
/// mixture law of the two prediction errors: components have means
/// (0, -beta1/2) and (0, +beta1/2), each with probability 1/2, and shared
/// covariance sigma^2 [[1 + 2/n, 1 + 1/n], [1 + 1/n, 1 + 1/n]].
pub fn pip_expected_two_sample_mc(
    beta1: f64,
    sigma: f64,
    n: usize,
    n_mc: u64,
    tie_policy: TiePolicy,
    rng: &RngStream,
) -> Result<PipEstimate> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "balanced two-sample design needs even n >= 4, got {n}"
        )));
    }
    if !(sigma > 0.0) || n_mc == 0 {
        return Err(Error::InvalidArgument(
            "need sigma > 0 and at least one draw".into(),
        ));
    }
    let nf = n as f64;
    let s2 = sigma * sigma;
    let cov = [
        [s2 * (1.0 + 2.0 / nf), s2 * (1.0 + 1.0 / nf)],
        [s2 * (1.0 + 1.0 / nf), s2 * (1.0 + 1.0 / nf)],
    ];
    let minus = BivariateGaussian::new([0.0, -0.5 * beta1], cov)?;
    let plus = BivariateGaussian::new([0.0, 0.5 * beta1], cov)?;

    let mean = chunked_mc(n_mc, rng, |stream, count| {
        let mut sum = 0.0;
        for _ in 0..count {
            let dist = if stream.next_f64() < 0.5 {
                &minus
            } else {
                &plus
            };
            let [e1, e0] = sample_bivariate_normal(dist, stream);
            sum += indicator_unchecked(e1 * e1, e0 * e0, tie_policy);
        }
        sum
    });

    Ok(
        PipEstimate::new(mean, "expected_mc")?.with_meta(EstimateMeta {
            n_mc: Some(n_mc),
            ..EstimateMeta::default()
        }),
    )
}

/// Expected PIP for the uniform-covariate simple regression. Per draw the
/// covariate is uniform on [a, b]; conditional on it the two prediction
/// errors are bivariate normal with mean (0, beta1 (x - x_bar)) and a
/// covariance assembled from the residual variance and the coefficient
/// second moments.
pub fn pip_expected_uniform_mc(
    p: &UniformCovariateParams,
    moments: &SimpleRegressionMoments,
    n_mc: u64,
    tie_policy: TiePolicy,
    rng: &RngStream,
) -> Result<PipEstimate> {
    if n_mc == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    let s2 = p.sigma * p.sigma;
    let (vb0, vb1, cb) = (
        moments.var_intercept,
        moments.var_slope,
        moments.cov_intercept_slope,
    );
    let x_bar = moments.x_bar;
    // Null-model intercept variance via b00 = b0 + b1 x_bar.
    let var_b00 = vb0 + x_bar * x_bar * vb1 + 2.0 * x_bar * cb;

    let mean = chunked_mc(n_mc, rng, |stream, count| {
        let mut sum = 0.0;
        for _ in 0..count {
            let x = sample_uniform(p.a, p.b, stream).expect("validated bounds");
            let s11 = s2 + vb0 + x * x * vb1 + 2.0 * x * cb;
            let s12 = s2 + vb0 + x * cb + x_bar * cb + x_bar * x * vb1;
            let s22 = s2 + var_b00;
            let dist =
                BivariateGaussian::new([0.0, p.beta1 * (x - x_bar)], [[s11, s12], [s12, s22]])
                    .expect("conditional error covariance is PSD");
            let [e1, e0] = sample_bivariate_normal(&dist, stream);
            sum += indicator_unchecked(e1 * e1, e0 * e0, tie_policy);
        }
        sum
    });

    Ok(
        PipEstimate::new(mean, "expected_uniform_mc")?.with_meta(EstimateMeta {
            n_mc: Some(n_mc),
            ..EstimateMeta::default()
        }),
    )
}

// ---------------------------------------------------------------------------
// Empirical conditional PIP
// ---------------------------------------------------------------------------

/// A data-generating truth: draws fresh (covariate row, outcome) pairs.
pub trait TruthModel: Sync {
    /// Number of covariates per drawn row.
    fn dim(&self) -> usize;
    /// Fill `row` (length `dim()`) and return the outcome.
    fn draw(&self, rng: &mut RngStream, row: &mut [f64]) -> f64;
}

/// The empirical conditional PIP: the fraction of `n_t` fresh draws from
/// `truth` on which the full fit beats the null fit. This is the oracle
/// the conditional-PIP estimators are judged against.
pub fn pip_conditional_empirical(
    fit0: &dyn Prediction,
    fit1: &dyn Prediction,
    truth: &dyn TruthModel,
    loss: &dyn LossFunction,
    n_t: u64,
    tie_policy: TiePolicy,
    rng: &RngStream,
) -> Result<PipEstimate> {
    if n_t == 0 {
        return Err(Error::InvalidArgument("need at least one test draw".into()));
    }
    let dim = truth.dim();
    let mean = chunked_mc(n_t, rng, |stream, count| {
        let mut row = vec![0.0; dim];
        let mut sum = 0.0;
        for _ in 0..count {
            let y = truth.draw(stream, &mut row);
            let l1 = loss.eval(fit1.predict(&row), y);
            let l0 = loss.eval(fit0.predict(&row), y);
            sum += indicator_unchecked(l1, l0, tie_policy);
        }
        sum
    });
    Ok(
        PipEstimate::new(mean, "conditional_empirical")?.with_meta(EstimateMeta {
            n_mc: Some(n_t),
            ..EstimateMeta::default()
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::SquaredError;

    fn two_sample_dataset(g0: &[f64], g1: &[f64]) -> Dataset {
        let mut y = g0.to_vec();
        y.extend_from_slice(g1);
        let mut x = vec![0.0; g0.len()];
        x.extend(vec![1.0; g1.len()]);
        Dataset::new(y, x, vec!["x".into()]).unwrap()
    }

    #[test]
    fn c1_examples() {
        assert_eq!(pip_c1(0.0, 1.0).unwrap().estimate, 0.5);
        assert!((pip_c1(4.0, 1.0).unwrap().estimate - 0.841344746068543).abs() < 1e-9);
        assert!((pip_c1(-1.0, 1.0).unwrap().estimate - 0.5987063256829237).abs() < 1e-9);
        assert!(pip_c1(1.0, 0.0).is_err());
        assert!(pip_c1(1.0, -1.0).is_err());
    }

    #[test]
    fn c1_floor_and_monotonicity() {
        let mut rng = RngStream::new(17, 0);
        for _ in 0..10_000 {
            let b = (rng.next_f64() - 0.5) * 20.0;
            let s = rng.next_f64() * 5.0 + 1e-6;
            let e = pip_c1(b, s).unwrap().estimate;
            assert!(e >= 0.5);
            if b == 0.0 {
                assert_eq!(e, 0.5);
            } else {
                assert!(e > 0.5);
            }
        }
        // strictly increasing in |b|, strictly decreasing in s
        assert!(pip_c1(2.0, 1.0).unwrap().estimate > pip_c1(1.0, 1.0).unwrap().estimate);
        assert!(pip_c1(-2.0, 1.0).unwrap().estimate > pip_c1(1.0, 1.0).unwrap().estimate);
        assert!(pip_c1(1.0, 2.0).unwrap().estimate < pip_c1(1.0, 1.0).unwrap().estimate);
    }

    #[test]
    fn c1_group_relabel_invariance() {
        let data = two_sample_dataset(&[0.3, 1.7, -0.4, 0.9], &[2.1, 3.3, 1.9, 2.7]);
        let fit1 = crate::models::fit_ols(&data, &["x".into()]).unwrap();
        let e = pip_c1(fit1.coefficients[1], fit1.residual_sd())
            .unwrap()
            .estimate;

        // relabel x -> 1 - x
        let y: Vec<f64> = data.outcomes().to_vec();
        let x: Vec<f64> = (0..data.n()).map(|r| 1.0 - data.value(r, 0)).collect();
        let swapped = Dataset::new(y, x, vec!["x".into()]).unwrap();
        let fit1s = crate::models::fit_ols(&swapped, &["x".into()]).unwrap();
        let es = pip_c1(fit1s.coefficients[1], fit1s.residual_sd())
            .unwrap()
            .estimate;
        assert!((e - es).abs() < 1e-12);
    }

    #[test]
    fn c2_hand_worked_example() {
        let data = two_sample_dataset(&[0.0, 2.0], &[10.0, 12.0]);
        let fit0 = crate::models::fit_ols(&data, &[]).unwrap();
        let fit1 = crate::models::fit_ols(&data, &["x".into()]).unwrap();
        assert!((fit0.coefficients[0] - 6.0).abs() < 1e-12);
        assert!((fit1.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit1.coefficients[1] - 10.0).abs() < 1e-12);
        // midpoints 3.5 and 8.5; F0(3.5) = 1, F1(8.5) = 0 -> estimate 1
        let e = pip_c2(&data, &fit0, &fit1).unwrap();
        assert_eq!(e.estimate, 1.0);
    }

    #[test]
    fn c2_mirror_symmetry() {
        let g0 = [0.3, 1.7, -0.4, 0.9];
        let g1 = [2.1, 3.3, 1.9, 2.7];
        let data = two_sample_dataset(&g0, &g1);
        let fit0 = crate::models::fit_ols(&data, &[]).unwrap();
        let fit1 = crate::models::fit_ols(&data, &["x".into()]).unwrap();
        let e = pip_c2(&data, &fit0, &fit1).unwrap().estimate;

        let neg0: Vec<f64> = g0.iter().map(|v| -v).collect();
        let neg1: Vec<f64> = g1.iter().map(|v| -v).collect();
        let mirrored = two_sample_dataset(&neg0, &neg1);
        let m0 = crate::models::fit_ols(&mirrored, &[]).unwrap();
        let m1 = crate::models::fit_ols(&mirrored, &["x".into()]).unwrap();
        let em = pip_c2(&mirrored, &m0, &m1).unwrap().estimate;
        assert!((e - em).abs() < 1e-12);
    }

    #[test]
    fn c2_tie_convention() {
        let data = two_sample_dataset(&[1.0, 1.0], &[1.0, 1.0]);
        let fit0 = crate::models::fit_ols(&data, &[]).unwrap();
        let fit1 = crate::models::fit_ols(&data, &["x".into()]).unwrap();
        assert_eq!(pip_c2(&data, &fit0, &fit1).unwrap().estimate, 0.5);
    }

    #[test]
    fn c2_rejects_non_binary() {
        let data = Dataset::new(
            vec![1.0, 2.0, 3.0, 4.0],
            vec![0.0, 0.5, 1.0, 2.0],
            vec!["x".into()],
        )
        .unwrap();
        let fit0 = crate::models::fit_ols(&data, &[]).unwrap();
        let fit1 = crate::models::fit_ols(&data, &["x".into()]).unwrap();
        assert!(matches!(
            pip_c2(&data, &fit0, &fit1),
            Err(Error::NonBinaryCovariate(_))
        ));
    }

    #[test]
    fn theoretical_two_sample_examples() {
        let p = TwoSampleParams::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(pip_theoretical_two_sample(&p).unwrap().estimate, 0.5);
        let p = TwoSampleParams::new(0.0, -4.0, 1.0).unwrap();
        assert!(
            (pip_theoretical_two_sample(&p).unwrap().estimate - 0.841344746068543).abs() < 1e-9
        );
        let p = TwoSampleParams::new(0.0, -1.0, 1.0).unwrap();
        assert!(
            (pip_theoretical_two_sample(&p).unwrap().estimate - 0.5987063256829237).abs() < 1e-9
        );
        assert!(TwoSampleParams::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn theoretical_uniform_zero_slope_and_bounds() {
        let p = UniformCovariateParams::new(0.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(pip_theoretical_uniform(&p, 64).unwrap().estimate, 0.5);

        let p = UniformCovariateParams::new(0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let e = pip_theoretical_uniform(&p, 64).unwrap().estimate;
        let phi_eighth = std_normal_cdf(0.125);
        assert!(e > 0.5 && e < phi_eighth, "estimate {e}");
    }

    #[test]
    fn theoretical_uniform_quadrature_converged() {
        let p = UniformCovariateParams::new(0.3, -2.0, 0.7, -1.0, 3.0).unwrap();
        let a = pip_theoretical_uniform(&p, 64).unwrap().estimate;
        let b = pip_theoretical_uniform(&p, 128).unwrap().estimate;
        assert!((a - b).abs() <= 1e-10);
        // sign of the slope does not matter
        let q = UniformCovariateParams::new(0.3, 2.0, 0.7, -1.0, 3.0).unwrap();
        let c = pip_theoretical_uniform(&q, 64).unwrap().estimate;
        assert!((a - c).abs() <= 1e-12);
    }

    #[test]
    fn expected_two_sample_dominating_effect() {
        let rng = RngStream::new(100, 0);
        let e = pip_expected_two_sample_mc(100.0, 1.0, 20, 100_000, TiePolicy::Strict, &rng)
            .unwrap()
            .estimate;
        assert!(e >= 0.999, "estimate {e}");
    }

    #[test]
    fn expected_two_sample_validates() {
        let rng = RngStream::new(100, 0);
        assert!(pip_expected_two_sample_mc(0.0, 1.0, 21, 10, TiePolicy::Strict, &rng).is_err());
        assert!(pip_expected_two_sample_mc(0.0, 1.0, 2, 10, TiePolicy::Strict, &rng).is_err());
        assert!(pip_expected_two_sample_mc(0.0, 0.0, 20, 10, TiePolicy::Strict, &rng).is_err());
    }

    #[test]
    fn expected_two_sample_deterministic_across_partitioning() {
        let rng = RngStream::new(42, 9);
        let a = pip_expected_two_sample_mc(-1.0, 1.0, 20, 50_000, TiePolicy::Strict, &rng)
            .unwrap()
            .estimate;
        // a single-thread pool must agree bit for bit
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| {
            pip_expected_two_sample_mc(-1.0, 1.0, 20, 50_000, TiePolicy::Strict, &rng)
                .unwrap()
                .estimate
        });
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn expected_uniform_degenerate_cases() {
        let rng = RngStream::new(5, 1);
        // no coefficient noise and no slope: errors coincide almost surely
        let p = UniformCovariateParams::new(0.0, 0.0, 1.0, 0.0, 1.0).unwrap();
        let m = SimpleRegressionMoments::new(0.0, 0.0, 0.0, 0.5).unwrap();
        let strict = pip_expected_uniform_mc(&p, &m, 20_000, TiePolicy::Strict, &rng)
            .unwrap()
            .estimate;
        assert_eq!(strict, 0.0);
        let half = pip_expected_uniform_mc(&p, &m, 20_000, TiePolicy::HalfCredit, &rng)
            .unwrap()
            .estimate;
        assert_eq!(half, 0.5);
    }

    #[test]
    fn expected_uniform_reduces_to_theoretical_without_coefficient_noise() {
        let rng = RngStream::new(6, 0);
        let p = UniformCovariateParams::new(0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let m = SimpleRegressionMoments::new(0.0, 0.0, 0.0, 0.5).unwrap();
        let mc = pip_expected_uniform_mc(&p, &m, 1_000_000, TiePolicy::Strict, &rng)
            .unwrap()
            .estimate;
        let theo = pip_theoretical_uniform(&p, 64).unwrap().estimate;
        assert!((mc - theo).abs() < 0.005, "mc {mc}, theoretical {theo}");
    }

    struct TwoSampleTruthLocal {
        beta0: f64,
        beta1: f64,
        sigma: f64,
    }

    impl TruthModel for TwoSampleTruthLocal {
        fn dim(&self) -> usize {
            1
        }
        fn draw(&self, rng: &mut RngStream, row: &mut [f64]) -> f64 {
            let x = if rng.next_f64() < 0.5 { 0.0 } else { 1.0 };
            row[0] = x;
            self.beta0 + self.beta1 * x + self.sigma * crate::dists::sample_standard_normal(rng)
        }
    }

    struct ConstPred(f64, f64); // intercept + slope on column 0

    impl Prediction for ConstPred {
        fn predict(&self, row: &[f64]) -> f64 {
            self.0 + self.1 * row[0]
        }
    }

    #[test]
    fn conditional_empirical_at_true_parameters_hits_theoretical() {
        let truth = TwoSampleTruthLocal {
            beta0: 0.0,
            beta1: -1.0,
            sigma: 1.0,
        };
        let fit0 = ConstPred(-0.5, 0.0); // population mean
        let fit1 = ConstPred(0.0, -1.0);
        let rng = RngStream::new(2023, 0);
        let e = pip_conditional_empirical(
            &fit0,
            &fit1,
            &truth,
            &SquaredError,
            1_000_000,
            TiePolicy::Strict,
            &rng,
        )
        .unwrap()
        .estimate;
        assert!((e - 0.5987063256829237).abs() < 0.002, "estimate {e}");
    }

    #[test]
    fn conditional_empirical_identical_fits_strict_zero() {
        let truth = TwoSampleTruthLocal {
            beta0: 1.0,
            beta1: 0.5,
            sigma: 1.0,
        };
        let fit = ConstPred(1.0, 0.0);
        let rng = RngStream::new(9, 9);
        let e = pip_conditional_empirical(
            &fit,
            &fit,
            &truth,
            &SquaredError,
            10_000,
            TiePolicy::Strict,
            &rng,
        )
        .unwrap()
        .estimate;
        assert_eq!(e, 0.0);
    }
}

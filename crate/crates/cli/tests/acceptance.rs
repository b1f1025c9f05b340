//! Acceptance suite: one test per numbered criterion, each enforcing its
//! stated tolerance and runtime budget and printing one pass/fail line
//! (visible with `cargo test -- --nocapture`).

use std::time::{Duration, Instant};

use pipstats::dists::{sample_standard_normal, std_normal_cdf, std_normal_quantile, student_t_cdf};
use pipstats::loss::TiePolicy;
use pipstats::plugin::{pip_c1, pip_expected_two_sample_mc};
use pipstats::relations::{pip_from_pvalue, pvalue_from_pip, pvalue_two_sample};
use pipstats::resampling::ResamplingConfig;
use pipstats::rng::RngStream;
use pipstats::sim::{
    run_gbm_study, run_replication, run_two_sample_study, NonlinearScenario, OutcomeSpec,
    ReplicationStudySpec, StudyOptions, TwoSampleScenario,
};
use pipstats::Dataset;

fn finish(criterion: u32, name: &str, t0: Instant, budget: Duration) {
    let elapsed = t0.elapsed();
    assert!(
        elapsed <= budget,
        "criterion {criterion} ({name}): FAIL — runtime {elapsed:?} over budget {budget:?}"
    );
    println!("criterion {criterion} ({name}): PASS in {elapsed:?}");
}

fn two_sample_dataset(g0: &[f64], g1: &[f64]) -> Dataset {
    let mut y = g0.to_vec();
    y.extend_from_slice(g1);
    let mut x = vec![0.0; g0.len()];
    x.extend(vec![1.0; g1.len()]);
    Dataset::new(y, x, vec!["x".into()]).unwrap()
}

/// Criterion 1: for 200 random balanced two-sample datasets the C1
/// plug-in equals the p-value route within 1e-9.
#[test]
fn criterion_01_identity_c1_pvalue() {
    let t0 = Instant::now();
    let mut rng = RngStream::new(101, 0);
    for trial in 0..200 {
        let half = 10 + (rng.next_below(191) as usize); // n in {20, ..., 400}
        let beta1 = (rng.next_f64() - 0.5) * 3.0;
        let sigma = 0.5 + 1.5 * rng.next_f64();
        let g0: Vec<f64> = (0..half)
            .map(|_| sigma * sample_standard_normal(&mut rng))
            .collect();
        let g1: Vec<f64> = (0..half)
            .map(|_| beta1 + sigma * sample_standard_normal(&mut rng))
            .collect();
        let data = two_sample_dataset(&g0, &g1);
        let fit = pipstats::models::fit_ols(&data, &["x".into()]).unwrap();
        let c1 = pip_c1(fit.coefficients[1], fit.residual_sd())
            .unwrap()
            .estimate;
        let p = pvalue_two_sample(&data).unwrap().p_value;
        let via_p = pip_from_pvalue(p, data.n()).unwrap();
        assert!(
            (c1 - via_p).abs() <= 1e-9,
            "criterion 1: FAIL — trial {trial} (n = {}): C1 {c1} vs p-route {via_p}",
            data.n()
        );
    }
    finish(1, "C1/p-value identity", t0, Duration::from_secs(5));
}

/// Criterion 2: the p-value <-> PIP maps invert each other within 1e-9
/// on the stated grid.
#[test]
fn criterion_02_round_trip() {
    let t0 = Instant::now();
    for n in [20usize, 60, 400] {
        for &p in &[1e-6, 1e-4, 0.01, 0.05, 0.5, 0.99] {
            let pip = pip_from_pvalue(p, n).unwrap();
            let back = pvalue_from_pip(pip, n).unwrap();
            assert!(
                (back - p).abs() <= 1e-9,
                "criterion 2: FAIL — p = {p}, n = {n}: round trip gave {back}"
            );
        }
    }
    finish(2, "p-value round trip", t0, Duration::from_secs(1));
}

/// Criterion 3: the closed form Phi(|b|/4s) matches a 1e6-draw
/// brute-force evaluation of the theoretical PIP within 0.002.
#[test]
fn criterion_03_theoretical_oracle() {
    let t0 = Instant::now();
    let cases = [
        (0.0f64, 1.0f64, 0.5f64),
        (-1.0, 1.0, 0.5987063256829237),
        (-4.0, 1.0, 0.841344746068543),
    ];
    for (i, &(beta1, sigma, frozen)) in cases.iter().enumerate() {
        let closed = std_normal_cdf(beta1.abs() / (4.0 * sigma));
        assert!((closed - frozen).abs() < 1e-9);

        // brute force: true models, fresh draws; ties get half credit so
        // the identical-models case sits at exactly one half
        let mut rng = RngStream::new(301 + i as u64, 0);
        let mut sum = 0.0;
        let draws = 1_000_000;
        for _ in 0..draws {
            let x = if rng.next_f64() < 0.5 { 0.0 } else { 1.0 };
            let y = beta1 * x + sigma * sample_standard_normal(&mut rng);
            let e1 = beta1 * x - y;
            let e0 = 0.5 * beta1 - y;
            let (l1, l0) = (e1 * e1, e0 * e0);
            sum += if l1 < l0 {
                1.0
            } else if l1 > l0 {
                0.0
            } else {
                0.5
            };
        }
        let mc = sum / draws as f64;
        assert!(
            (closed - mc).abs() <= 0.002,
            "criterion 3: FAIL — (beta1, sigma) = ({beta1}, {sigma}): closed {closed} vs MC {mc}"
        );
    }
    finish(3, "theoretical PIP oracle", t0, Duration::from_secs(10));
}

/// Criterion 4: the error-mixture Monte Carlo agrees with the full
/// simulate-fit-predict oracle within 0.01.
#[test]
fn criterion_04_expected_pip_mixture() {
    let t0 = Instant::now();
    for (i, &(beta1, n)) in [(0.0f64, 20usize), (-1.0, 20), (-1.0, 400)]
        .iter()
        .enumerate()
    {
        // pipeline oracle: independent of the mixture path; fits are the
        // closed-form group means
        let mut rng = RngStream::new(401 + i as u64, 0);
        let reps = 100_000;
        let mut hits = 0u32;
        let half = n / 2;
        for _ in 0..reps {
            let mut sum0 = 0.0;
            let mut sum1 = 0.0;
            for _ in 0..half {
                sum0 += sample_standard_normal(&mut rng);
            }
            for _ in 0..half {
                sum1 += beta1 + sample_standard_normal(&mut rng);
            }
            let (m0g, m1g) = (sum0 / half as f64, sum1 / half as f64);
            let pooled = 0.5 * (m0g + m1g);
            let x = if rng.next_f64() < 0.5 { 0.0 } else { 1.0 };
            let y = beta1 * x + sample_standard_normal(&mut rng);
            let e1 = if x == 0.0 { m0g } else { m1g } - y;
            let e0 = pooled - y;
            if e1 * e1 < e0 * e0 {
                hits += 1;
            }
        }
        let pipeline = hits as f64 / reps as f64;

        let mixture = pip_expected_two_sample_mc(
            beta1,
            1.0,
            n,
            1_000_000,
            TiePolicy::Strict,
            &RngStream::new(451 + i as u64, 0),
        )
        .unwrap()
        .estimate;
        assert!(
            (mixture - pipeline).abs() <= 0.01,
            "criterion 4: FAIL — (beta1, n) = ({beta1}, {n}): mixture {mixture} vs pipeline {pipeline}"
        );
    }
    finish(
        4,
        "expected-PIP mixture vs pipeline",
        t0,
        Duration::from_secs(120),
    );
}

/// Criterion 5: desk-scale decision rates at 1000 runs within the stated
/// bands. The error scale is 2, pinned by the published power column.
#[test]
fn criterion_05_two_sample_decision_rates() {
    let t0 = Instant::now();
    let opts = StudyOptions::default();
    let expect = [
        // (n, beta1, [(rule, target, tolerance)])
        (
            20usize,
            0.0f64,
            vec![
                ("p_value", 94.81, 2.5),
                ("pip", 63.48, 4.0),
                ("pip_lb", 84.40, 3.5),
                ("delta_mse", 80.05, 3.5),
            ],
        ),
        (
            20,
            -1.0,
            vec![
                ("p_value", 18.30, 3.5),
                ("pip", 57.59, 4.5),
                ("pip_lb", 31.62, 4.5),
                ("delta_mse", 41.13, 4.5),
            ],
        ),
    ];
    for (n, beta1, checks) in expect {
        let scenario = TwoSampleScenario {
            n,
            beta0: 0.0,
            beta1,
            sigma: 2.0,
            runs: 1000,
            master_seed: 20220101,
        };
        let res = run_two_sample_study(&scenario, &[], &opts).unwrap();
        for (rule, target, tol) in checks {
            let got = res.decisions.rate(rule).unwrap();
            assert!(
                (got - target).abs() <= tol,
                "criterion 5: FAIL — n = {n}, beta1 = {beta1}, rule {rule}: {got} not within {tol} of {target}"
            );
        }
    }
    // large sample, medium effect: every rule at least 98
    let scenario = TwoSampleScenario {
        n: 400,
        beta0: 0.0,
        beta1: -1.0,
        sigma: 2.0,
        runs: 1000,
        master_seed: 20220101,
    };
    let res = run_two_sample_study(&scenario, &[], &opts).unwrap();
    for rate in &res.decisions.rates {
        assert!(
            rate.percent >= 98.0,
            "criterion 5: FAIL — n = 400 rule {} at {}",
            rate.rule,
            rate.percent
        );
    }
    finish(5, "two-sample decision rates", t0, Duration::from_secs(600));
}

/// Criterion 6: the C1 estimate never drops below one half, and equals
/// it exactly only for a zero effect.
#[test]
fn criterion_06_c1_floor() {
    let t0 = Instant::now();
    let mut rng = RngStream::new(601, 0);
    for _ in 0..10_000 {
        let b = (rng.next_f64() - 0.5) * 40.0;
        let s = 1e-3 + rng.next_f64() * 10.0;
        let e = pip_c1(b, s).unwrap().estimate;
        assert!(e >= 0.5, "criterion 6: FAIL — C1({b}, {s}) = {e} < 0.5");
        assert_eq!(
            e == 0.5,
            b == 0.0,
            "criterion 6: FAIL — floor equality at b = {b}, s = {s}"
        );
    }
    assert_eq!(pip_c1(0.0, 3.0).unwrap().estimate, 0.5);
    finish(6, "C1 floor", t0, Duration::from_secs(1));
}

/// Criterion 7: boosting study at 100 runs; 5-fold and repeated 5-fold
/// hit at least 95% at n = 100, and split-sample trails repeated CV at
/// n = 40.
#[test]
fn criterion_07_gbm_decision_rates() {
    let t0 = Instant::now();
    let opts = StudyOptions::default();
    let hp = pipstats::models::GbmHyperparams::default();

    let at = |n: usize| {
        let scenario = NonlinearScenario {
            n,
            noise_sd: 1.6,
            runs: 100,
            master_seed: 20220101,
        };
        run_gbm_study(&scenario, &opts, &hp).unwrap()
    };

    let res100 = at(100);
    for rule in ["pip_cv", "pip_repeated_cv"] {
        let got = res100.decisions.rate(rule).unwrap();
        assert!(
            got >= 95.0,
            "criterion 7: FAIL — n = 100 rule {rule} at {got}"
        );
    }
    let res40 = at(40);
    let ss = res40.decisions.rate("pip_split_sample").unwrap();
    let repcv = res40.decisions.rate("pip_repeated_cv").unwrap();
    assert!(
        ss < repcv,
        "criterion 7: FAIL — n = 40 split-sample {ss} not below repeated CV {repcv}"
    );
    finish(7, "boosting decision rates", t0, Duration::from_secs(900));
}

fn replication_specs() -> Vec<ReplicationStudySpec> {
    vec![
        ReplicationStudySpec {
            name: "gervais".into(),
            outcome: OutcomeSpec::Gaussian {
                n1: 31,
                mean1: 61.55,
                sd1: 35.68,
                n2: 26,
                mean2: 41.42,
                sd2: 31.47,
            },
        },
        ReplicationStudySpec {
            name: "ackerman".into(),
            outcome: OutcomeSpec::Gaussian {
                n1: 26,
                mean1: 5.80,
                sd1: 0.76,
                n2: 28,
                mean2: 5.38,
                sd2: 0.79,
            },
        },
        ReplicationStudySpec {
            name: "balafoutas".into(),
            outcome: OutcomeSpec::Binomial {
                n1: 36,
                p1: 0.306,
                n2: 36,
                p2: 0.583,
            },
        },
        ReplicationStudySpec {
            name: "wilson".into(),
            outcome: OutcomeSpec::Gaussian {
                n1: 15,
                mean1: 3.20,
                sd1: 2.23,
                n2: 15,
                mean2: 6.87,
                sd2: 1.91,
            },
        },
    ]
}

/// Criterion 8: replication of the published studies. The Gaussian
/// p-values are deterministic under exact moment matching; the PIP level
/// checks average the repeated-CV estimate over 20 master seeds, since a
/// single n <= 57 resampling estimate has sampling spread wider than the
/// stated bands.
///
/// Known failure, kept red on purpose: the published 0.0488 cannot be
/// reproduced from the published group summaries. Exact moment matching
/// gives 0.052090 under the pooled t-test (0.0520 Welch, 0.0468 pooled
/// z), all outside 0.0488 +/- 0.002; the published value reflects the
/// sampling luck of one unpublished draw.
#[test]
fn criterion_08_application_reproduction() {
    let t0 = Instant::now();
    let specs = replication_specs();
    let cfg = ResamplingConfig::default();

    let mut failures: Vec<String> = Vec::new();
    let mut check = |ok: bool, line: String| {
        println!(
            "  criterion 8 [{}] {line}",
            if ok { "pass" } else { "FAIL" }
        );
        if !ok {
            failures.push(line);
        }
    };

    let first = run_replication(&specs, &cfg, 20220101).unwrap();
    let p: Vec<f64> = first.iter().map(|r| r.p_value).collect();
    check(
        (p[0] - 0.0291).abs() <= 0.002,
        format!("gervais p = {:.6}, want 0.0291 +/- 0.002", p[0]),
    );
    check(
        (p[1] - 0.0488).abs() <= 0.002,
        format!("ackerman p = {:.6}, want 0.0488 +/- 0.002", p[1]),
    );
    check(
        (p[2] - 0.0177).abs() <= 0.0005,
        format!("balafoutas p = {:.6}, want 0.0177 +/- 0.0005", p[2]),
    );
    check(
        p[3] < 0.001,
        format!("wilson p = {:.6}, want < 0.001", p[3]),
    );

    let mut gervais_sum = 0.0;
    let mut wilson_sum = 0.0;
    for seed in 0..20u64 {
        let res = run_replication(&specs, &cfg, 20220101 + seed).unwrap();
        gervais_sum += res[0].pip.estimate;
        wilson_sum += res[3].pip.estimate;
    }
    let gervais_mean = gervais_sum / 20.0;
    let wilson_mean = wilson_sum / 20.0;
    check(
        (0.46..=0.58).contains(&gervais_mean),
        format!("gervais mean PIP over 20 seeds = {gervais_mean:.4}, want in [0.46, 0.58]"),
    );
    check(
        (0.64..=0.78).contains(&wilson_mean),
        format!("wilson mean PIP over 20 seeds = {wilson_mean:.4}, want in [0.64, 0.78]"),
    );

    assert!(
        failures.is_empty(),
        "criterion 8: FAIL — {}",
        failures.join("; ")
    );
    finish(8, "application reproduction", t0, Duration::from_secs(120));
}

/// Criterion 9: every CLI invocation is byte-identical at 1 and 8
/// worker threads for a fixed seed.
#[test]
fn criterion_09_cli_determinism() {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_pipstats");
    let tmp = std::env::temp_dir().join(format!("pipstats_accept_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();

    let sim_cfg = tmp.join("sim.json");
    std::fs::write(
        &sim_cfg,
        r#"{
            "study": "two_sample",
            "scenarios": [{"n": 20, "beta1": -1.0, "sigma": 2.0, "runs": 100}],
            "estimators": ["c1", "c2", "expected_mc", "loo", "cv", "repeated_cv", "split_sample"]
        }"#,
    )
    .unwrap();
    let rep_cfg = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs/replication_studies.json");
    let fixture = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/linear_uniform_40.csv");

    let run_at = |threads: &str, out_tag: &str| -> Vec<Vec<u8>> {
        let mut outputs = Vec::new();
        // estimate and relate take no --threads flag; the worker count
        // comes from the environment
        for args in [
            vec![
                "estimate",
                "--input",
                fixture.to_str().unwrap(),
                "--outcome",
                "y",
                "--full-covariates",
                "x",
                "--method",
                "repcv",
                "--seed",
                "17",
            ],
            vec!["relate", "--n", "60", "--p", "0.01", "--sigma", "1.5"],
        ] {
            let out = std::process::Command::new(bin)
                .args(&args)
                .env("RAYON_NUM_THREADS", threads)
                .output()
                .unwrap();
            assert!(out.status.success());
            outputs.push(out.stdout);
        }
        let out_dir = tmp.join(format!("out_{out_tag}"));
        let out = std::process::Command::new(bin)
            .args([
                "simulate",
                "--config",
                sim_cfg.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
                "--threads",
                threads,
            ])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        // stdout mentions the output path; compare files instead
        outputs.push(std::fs::read(out_dir.join("decisions.json")).unwrap());
        outputs.push(std::fs::read(out_dir.join("two_sample_n20_beta-1.csv")).unwrap());

        let out = std::process::Command::new(bin)
            .args([
                "replicate",
                "--config",
                rep_cfg.to_str().unwrap(),
                "--threads",
                threads,
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(out.stdout);
        outputs
    };

    let one = run_at("1", "t1");
    let eight = run_at("8", "t8");
    assert_eq!(one.len(), eight.len());
    for (i, (a, b)) in one.iter().zip(&eight).enumerate() {
        assert!(
            a == b,
            "criterion 9: FAIL — output {i} differs between 1 and 8 threads"
        );
    }
    std::fs::remove_dir_all(&tmp).ok();
    finish(
        9,
        "CLI determinism across threads",
        t0,
        Duration::from_secs(300),
    );
}

/// Criterion 10: distribution numerics hold their stated accuracy on the
/// stated grids.
#[test]
fn criterion_10_numerics() {
    let t0 = Instant::now();
    // quantile/CDF round trip on a log-spaced grid in (1e-10, 1 - 1e-10)
    let mut p = 1e-10;
    while p < 0.5 {
        for q in [p, 1.0 - p] {
            let z = std_normal_quantile(q).unwrap();
            let back = std_normal_cdf(z);
            assert!(
                (back - q).abs() <= 1e-8,
                "criterion 10: FAIL — normal round trip at p = {q}: {back}"
            );
        }
        p *= 2.7;
    }
    // monotone CDF
    let mut prev = 0.0;
    let mut z = -8.0;
    while z <= 8.0 {
        let c = std_normal_cdf(z);
        assert!(c >= prev, "criterion 10: FAIL — CDF decreases at {z}");
        prev = c;
        z += 0.005;
    }
    // Student-t approaches the normal
    let mut worst: f64 = 0.0;
    let mut t = -5.0;
    while t <= 5.0 {
        let diff = (student_t_cdf(t, 1_000_000).unwrap() - std_normal_cdf(t)).abs();
        worst = worst.max(diff);
        t += 0.1;
    }
    assert!(
        worst <= 1e-5,
        "criterion 10: FAIL — t(df = 1e6) vs normal: max diff {worst}"
    );
    finish(10, "distribution numerics", t0, Duration::from_secs(10));
}

//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs without the test harness so the lines show up in plain `cargo test`
//! output. A criterion that fails makes the target exit non-zero, except for
//! entries in [`KNOWN_DEVIATIONS`], which are still printed as FAIL with the
//! reason and must keep failing in exactly the documented way.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{column, maclip, p, stdout, synthetic};
use maclip::magnitude::transformed_mean;
use maclip::metrics::{logistic_fit, LogisticParams};
use maclip::{
    boxcox, fusion_weights, fuse, plcc, q_mag, q_mag_variant, q_sim, srcc, MagnitudeVariant, PromptPair,
    ScoreConfig,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

/// Stated golden for q_mag([1,−2,3,−4], λ=0.5) and its tolerance.
const Q_MAG_STATED: f64 = 1.55268;
/// The same quantity from a 30-digit step-by-step evaluation of the formula.
const Q_MAG_ORACLE: f64 = 1.552_557_027_762_083;

/// Criteria known to fail and why. Each entry names the single check that fails.
const KNOWN_DEVIATIONS: &[(u8, &str, &str)] = &[(
    1,
    "q_mag stated golden",
    "the stated value 1.55268 is not what the formula produces: |F|=[1,2,3,4], σ=√1.25, \
     mean of 2(√(x/σ+1)−1) = 1.5525570278 (30-digit oracle), 1.23e-4 away; the implementation \
     matches the oracle to 1e-12 and is not tuned toward the stated number",
)];

struct Check {
    label: String,
    passed: bool,
    detail: String,
}

fn check(label: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        label: label.to_string(),
        passed,
        detail: detail.into(),
    }
}

struct Criterion {
    id: u8,
    title: &'static str,
    checks: Vec<Check>,
    seconds: f64,
}

// ---------------------------------------------------------------- criterion 1

fn formula_goldens() -> Vec<Check> {
    let c = ScoreConfig::default();
    let qm = q_mag(&[1.0, -2.0, 3.0, -4.0], &c).unwrap().q_mag;
    let w = fusion_weights(0.5, 0.5, &c).unwrap();
    let bc = boxcox(3.0, 0.5).unwrap();
    vec![
        check(
            "q_mag stated golden",
            (qm - Q_MAG_STATED).abs() <= 1e-4,
            format!("q_mag = {qm:.10}, stated {Q_MAG_STATED} ± 1e-4, |diff| = {:.3e}", (qm - Q_MAG_STATED).abs()),
        ),
        check(
            "q_mag oracle",
            (qm - Q_MAG_ORACLE).abs() <= 1e-12,
            format!("q_mag = {qm:.15}, oracle {Q_MAG_ORACLE}"),
        ),
        check(
            "fusion weights at Δ=0",
            (w.w_sim - 0.59868766).abs() <= 1e-8 && (w.w_mag - 0.40131234).abs() <= 1e-8,
            format!("w = ({:.10}, {:.10})", w.w_sim, w.w_mag),
        ),
        check("boxcox(3, 0.5) == 2", bc == 2.0, format!("boxcox(3, 0.5) = {bc:?}")),
    ]
}

// ---------------------------------------------------------------- criterion 2

const CASES: u32 = 1000;

fn runner(salt: u8) -> TestRunner {
    let mut seed = [0x5e_u8; 32];
    seed[0] = salt;
    TestRunner::new_with_rng(
        Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
    )
}

fn property<S: Strategy>(
    label: &str,
    salt: u8,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Check {
    let outcome = runner(salt).run(&strategy, test);
    match outcome {
        Ok(()) => check(label, true, format!("{CASES} cases")),
        Err(e) => check(label, false, e.to_string()),
    }
}

fn vector(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, d)
        .prop_filter("non-trivial norm", |v| v.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-3)
}

fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..48).prop_flat_map(|d| (vector(d), vector(d), vector(d)))
}

fn definition_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let less = v.iter().filter(|&&y| y < x).count() as f64;
            let equal = v.iter().filter(|&&y| y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

fn textbook_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

fn property_battery() -> Vec<Check> {
    let pairs = |lo: f64, hi: f64, n: std::ops::Range<usize>| {
        prop::collection::vec((lo..hi, lo..hi), n).prop_map(|v| v.into_iter().unzip::<f64, f64, Vec<_>, Vec<_>>())
    };
    vec![
        property("q_sim in (0,1)", 1, (triple(), 1e-4f64..2.0), |((img, pos, neg), tau)| {
            let c = ScoreConfig { tau, ..ScoreConfig::default() };
            let q = q_sim(&img, &PromptPair::new(pos, neg).unwrap(), &c).unwrap();
            prop_assert!(q > 0.0 && q < 1.0, "q = {}", q);
            Ok(())
        }),
        property("q_sim scale invariance", 2, (triple(), 1e-3f64..1e3), |((img, pos, neg), s)| {
            let prompts = PromptPair::new(pos, neg).unwrap();
            let c = ScoreConfig::default();
            let scaled: Vec<f64> = img.iter().map(|v| v * s).collect();
            let (a, b) = (q_sim(&img, &prompts, &c).unwrap(), q_sim(&scaled, &prompts, &c).unwrap());
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
            Ok(())
        }),
        property(
            "q_mag scale invariance vs L1/L2 covariance",
            3,
            (prop::collection::vec(-5.0f64..5.0, 8..128), 0.1f64..10.0),
            |(row, s)| {
                let c = ScoreConfig::default();
                let base = q_mag(&row, &c).unwrap();
                prop_assume!(base.sigma > 1e-2);
                let scaled: Vec<f64> = row.iter().map(|v| v * s).collect();
                let other = q_mag(&scaled, &c).unwrap().q_mag;
                prop_assert!((base.q_mag - other).abs() < 1e-6);
                for variant in [MagnitudeVariant::L1, MagnitudeVariant::L2] {
                    let a = q_mag_variant(&row, variant).unwrap();
                    let b = q_mag_variant(&scaled, variant).unwrap();
                    prop_assert!((b - s * a).abs() <= 1e-12 * b.abs().max(1.0), "{:?}: {} vs {}", variant, b, s * a);
                }
                Ok(())
            },
        ),
        property(
            "fusion simplex, monotone in Δ, bounded",
            4,
            (0.0f64..1.0, 0.0f64..20.0, 0.0f64..20.0, 0.01f64..5.0),
            |(s, m1, m2, alpha)| {
                let c = ScoreConfig { alpha, ..ScoreConfig::default() };
                let (w1, q1) = fuse(s, m1, &c).unwrap();
                let (w2, _) = fuse(s, m2, &c).unwrap();
                for w in [w1, w2] {
                    prop_assert!(w.w_sim > 0.0 && w.w_sim < 1.0 && w.w_mag > 0.0 && w.w_mag < 1.0);
                    prop_assert!((w.w_sim + w.w_mag - 1.0).abs() < 1e-12);
                }
                if w1.delta > w2.delta + 1e-9 {
                    prop_assert!(w1.w_sim > w2.w_sim);
                } else if w2.delta > w1.delta + 1e-9 {
                    prop_assert!(w2.w_sim > w1.w_sim);
                }
                let slack = 1e-12 * m1.max(1.0);
                prop_assert!(q1 >= s.min(m1) - slack && q1 <= s.max(m1) + slack);
                Ok(())
            },
        ),
        property("boxcox continuity at λ→0", 5, 0.0f64..100.0, |x| {
            prop_assert!((boxcox(x, 1e-9).unwrap() - x.ln_1p()).abs() < 1e-6);
            let profile = [x, x + 1.0];
            prop_assert!((transformed_mean(&profile, 1e-9).unwrap() - transformed_mean(&profile, 0.0).unwrap()).abs() < 1e-6);
            Ok(())
        }),
        property("SRCC monotone-transform invariance", 6, pairs(-5.0, 5.0, 3..60), |(x, y)| {
            let Ok(r) = srcc(&x, &y) else { return Ok(()) };
            for f in [f64::exp as fn(f64) -> f64, |v: f64| v * v * v + 3.0 * v] {
                let fx: Vec<f64> = x.iter().map(|&v| f(v)).collect();
                let r2 = srcc(&fx, &y).unwrap();
                prop_assert!((r2 - r).abs() < 1e-12, "{} vs {}", r2, r);
            }
            Ok(())
        }),
        property(
            "PLCC affine invariance",
            7,
            (pairs(-10.0, 10.0, 3..80), 0.1f64..10.0, -100.0f64..100.0),
            |((x, y), a, b)| {
                let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
                prop_assert!((plcc(&ax, &y).unwrap() - plcc(&x, &y).unwrap()).abs() < 1e-12);
                Ok(())
            },
        ),
        property(
            "SRCC = midrank oracle, n ≤ 8 with ties",
            8,
            (3usize..=8).prop_flat_map(|n| (prop::collection::vec(0u8..4, n), prop::collection::vec(0u8..4, n))),
            |(a, b)| {
                let x: Vec<f64> = a.iter().map(|&v| f64::from(v)).collect();
                let y: Vec<f64> = b.iter().map(|&v| f64::from(v)).collect();
                let oracle = textbook_pearson(&definition_ranks(&x), &definition_ranks(&y));
                match (srcc(&x, &y), oracle) {
                    (Ok(r), Some(o)) => prop_assert!((r - o).abs() < 1e-12, "{} vs {}", r, o),
                    (Err(_), None) => {}
                    (got, want) => prop_assert!(false, "srcc {:?}, oracle {:?}", got, want),
                }
                Ok(())
            },
        ),
    ]
}

// ---------------------------------------------------------------- criteria 3, 4

const FIXTURE_SEED: u64 = 20_241_016;

/// Fixture seed, overridable with `MACLIP_ACCEPTANCE_SEED` to check robustness.
fn fixture_seed() -> u64 {
    std::env::var("MACLIP_ACCEPTANCE_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(FIXTURE_SEED)
}

fn synthetic_end_to_end() -> Vec<Check> {
    let fx = synthetic(fixture_seed());
    let scores = fx.path("scores.csv");
    stdout(&maclip([
        "score", "--embeddings", p(&fx.embeddings), "--prompts", p(&fx.prompts), "--out", p(&scores),
    ]));
    let report: serde_json::Value = serde_json::from_str(&stdout(&maclip([
        "eval", "--scores", p(&scores), "--mos", p(&fx.mos),
    ])))
    .unwrap();
    let fused = report["srcc"].as_f64().unwrap();

    let sweep = stdout(&maclip([
        "sweep-lambda", "--embeddings", p(&fx.embeddings), "--prompts", p(&fx.prompts),
        "--mos", p(&fx.mos), "--grid", "0.1:2.0:0.1",
    ]));
    let lambdas = column(&sweep, "lambda");
    let s = column(&sweep, "srcc");
    let at = |l: f64| lambdas.iter().position(|&v| v == l).map(|i| s[i]).unwrap_or(f64::NAN);
    let (mid, top, next) = (at(0.5), at(2.0), at(1.9));
    let finite = lambdas.len() == 20
        && s.iter().chain(&column(&sweep, "plcc_raw")).all(|v| v.is_finite());
    vec![
        check("fused SRCC ≥ 0.99", fused >= 0.99, format!("SRCC = {fused}")),
        check(
            "sweep finite on [0.1, 2.0]",
            finite,
            format!("{} grid points, SRCC range [{:.6}, {:.6}]", lambdas.len(),
                s.iter().copied().fold(f64::INFINITY, f64::min), s.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        ),
        check(
            "largest λ degrade vs λ=0.5",
            top < mid && next < mid,
            format!("SRCC λ=0.5: {mid}, λ=1.9: {next}, λ=2.0: {top}"),
        ),
    ]
}

fn determinism() -> Vec<Check> {
    let fx = synthetic(fixture_seed());
    let run = |jobs: &str| {
        let out = fx.path(&format!("scores_j{jobs}.csv"));
        stdout(&maclip([
            "score", "--embeddings", p(&fx.embeddings), "--prompts", p(&fx.prompts), "--jobs", jobs, "--out", p(&out),
        ]));
        std::fs::read(out).unwrap()
    };
    let (one, eight) = (run("1"), run("8"));
    let detail = format!("{} vs {} bytes", one.len(), eight.len());
    vec![check("--jobs 1 == --jobs 8", one == eight && !one.is_empty(), detail)]
}

// ---------------------------------------------------------------- criterion 5

fn logistic_self_consistency() -> Vec<Check> {
    let cases = [
        (LogisticParams([1.0, 0.0, 0.5, 0.1]), (0.0, 1.0)),
        (LogisticParams([5.0, 1.0, 0.3, 0.2]), (-0.5, 1.0)),
        (LogisticParams([80.0, 10.0, 2.0, 0.75]), (0.0, 4.0)),
    ];
    cases
        .iter()
        .map(|(truth, (lo, hi))| {
            let x: Vec<f64> = (0..100).map(|i| lo + (hi - lo) * f64::from(i) / 99.0).collect();
            let y: Vec<f64> = x.iter().map(|&v| truth.eval(v)).collect();
            let fit = logistic_fit(&x, &y).unwrap();
            let [b1, b2, b3, b4] = fit.params.0;
            let [t1, t2, t3, t4] = truth.0;
            // the scale enters as |β₄|, so its sign is not identifiable
            let err = [b1 - t1, b2 - t2, b3 - t3, b4.abs() - t4].map(f64::abs);
            let max_err = err.iter().copied().fold(0.0, f64::max);
            let r = plcc(&fit.mapped, &y).unwrap();
            check(
                &format!("recover {:?}", truth.0),
                fit.converged && max_err < 1e-3 && (r - 1.0).abs() <= 1e-6,
                format!("max |Δβ| = {max_err:.2e}, mapped PLCC = {r}, converged = {}", fit.converged),
            )
        })
        .collect()
}

// ---------------------------------------------------------------- driver

fn timed(id: u8, title: &'static str, f: fn() -> Vec<Check>) -> Criterion {
    let start = Instant::now();
    let checks = f();
    Criterion {
        id,
        title,
        checks,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are harness conventions; honour --list.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let criteria = [
        timed(1, "formula goldens", formula_goldens),
        timed(2, "seeded property battery", property_battery),
        timed(3, "synthetic end-to-end", synthetic_end_to_end),
        timed(4, "determinism across worker counts", determinism),
        timed(5, "logistic-fit self-consistency", logistic_self_consistency),
    ];

    let mut unexpected = 0;
    println!();
    for c in &criteria {
        let failed: Vec<&Check> = c.checks.iter().filter(|k| !k.passed).collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {}: {} ({:.2}s)", c.id, c.title, c.seconds);
        for k in &c.checks {
            println!("         {} {}: {}", if k.passed { "ok  " } else { "FAIL" }, k.label, k.detail);
        }
        for k in &failed {
            match KNOWN_DEVIATIONS.iter().find(|(id, label, _)| *id == c.id && *label == k.label) {
                Some((_, _, why)) => println!("         known deviation: {why}"),
                None => unexpected += 1,
            }
        }
    }
    // a documented deviation that starts passing means the ledger is stale
    for (id, label, _) in KNOWN_DEVIATIONS {
        let still_fails = criteria
            .iter()
            .filter(|c| c.id == *id)
            .flat_map(|c| &c.checks)
            .any(|k| k.label == *label && !k.passed);
        if !still_fails {
            println!("documented deviation {id} / {label} no longer fails; update KNOWN_DEVIATIONS");
            unexpected += 1;
        }
    }
    let passed = criteria.iter().filter(|c| c.checks.iter().all(|k| k.passed)).count();
    println!("\nacceptance: {passed}/{} criteria pass, {unexpected} unexpected failure(s)", criteria.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

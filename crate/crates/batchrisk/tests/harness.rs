use batchrisk::core::hypotheses::{apply, fit, generate, SyntheticConfig, Task, Variant};
use batchrisk::core::risk::empirical_k_risk_exact;
use batchrisk::core::{LossKind, Method};
use batchrisk::counterexample::{certify, find_bce_counterexample};
use batchrisk::sweep::{run_sweep, SweepConfig};
use batchrisk::verify::{
    check_property1, mutants, run_check_audited, run_verification, subjects, Budget, CheckName,
};

fn sweep_config(task: Task, n: usize, variants: Vec<Variant>, kinds: Vec<LossKind>) -> SweepConfig {
    SweepConfig {
        data: SyntheticConfig {
            n_train: n,
            n_test: n,
            task,
            noise: 0.1,
            feature_dim: 3,
            seed: 11,
        },
        ks: (1..=5).collect(),
        kinds,
        variants,
        repetitions: 4,
        mc_draws: 2000,
        test_on_train: false,
    }
}

#[test]
fn default_verification_passes_and_flags_every_mutant() {
    let report = run_verification(2024, &Budget::default());
    for c in &report.checks {
        assert!(c.passed, "{} failed: {:?}", c.name.as_str(), c.counterexample);
        assert!(c.mutant.as_ref().unwrap().flagged, "{}", c.name.as_str());
    }
    assert!(report.passed);
    assert_eq!(report.checks.len(), CheckName::ALL.len());
}

#[test]
fn verification_is_deterministic() {
    let budget = Budget::uniform(20);
    let a = serde_json::to_string(&run_verification(5, &budget)).unwrap();
    let b = serde_json::to_string(&run_verification(5, &budget)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn k_over_n_mutant_yields_replayable_counterexample() {
    let tally = check_property1(1, 100, mutants::closed_k_over_n);
    assert!(tally.failed());
    assert!(tally.counterexample.is_some());
    assert!(!check_property1(1, 100, subjects::closed).failed());
}

#[test]
fn zero_budget_is_reported_as_skipped() {
    let mut budget = Budget::default();
    *budget.get_mut(CheckName::MassartBound) = 0;
    let r = run_check_audited(CheckName::MassartBound, 3, &budget);
    assert!(r.skipped && r.passed && r.instances_run == 0);
}

#[test]
fn bce_search_finds_a_replayable_witness() {
    let report = find_bce_counterexample(99, 10_000).unwrap();
    assert!(report.found);
    let w = report.witness.unwrap();
    let again = certify(&w.set, LossKind::Bce).unwrap().unwrap();
    assert_eq!(again.k, w.k);
    assert_eq!(again.curve, w.curve);
    for pair in w.kl_curve.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12);
    }
    assert_eq!(find_bce_counterexample(99, 10_000).unwrap().attempts, report.attempts);
}

#[test]
fn sweep_is_deterministic_and_matches_exact_risk() {
    let config = sweep_config(
        Task::ClassificationSign,
        12,
        vec![Variant::ConstantMean, Variant::LookupMemorizer],
        vec![LossKind::Mse, LossKind::Kl],
    );
    let a = run_sweep(&config).unwrap();
    let b = run_sweep(&config).unwrap();
    assert_eq!(a.csv(), b.csv());
    assert_eq!(a.rows.len(), 4 * 2 * 2 * 5);

    for (rep, &seed) in a.seeds.iter().enumerate() {
        let data = SyntheticConfig { seed, ..config.data.clone() };
        let (train, test) = generate(&data).unwrap();
        for &variant in &config.variants {
            let h = fit(variant, &train, seed).unwrap();
            for &kind in &config.kinds {
                let tr = apply(&h, &train, kind).unwrap();
                let te = apply(&h, &test, kind).unwrap();
                for &k in &config.ks {
                    let row = a.rows.iter().find(|r| {
                        r.seed == seed && r.variant == variant && r.kind == kind && r.k == k
                    });
                    let row = row.unwrap_or_else(|| panic!("missing row rep {rep}"));
                    assert_ne!(row.method, Method::MonteCarlo);
                    let want_train = empirical_k_risk_exact(&tr, k, kind).unwrap().value;
                    let want_test = empirical_k_risk_exact(&te, k, kind).unwrap().value;
                    assert!((row.train_risk - want_train).abs() <= 1e-9);
                    assert!((row.test_risk - want_test).abs() <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn constant_mean_zero_one_gap_depends_only_on_label_means() {
    let config = sweep_config(
        Task::ClassificationSign,
        40,
        vec![Variant::ConstantMean],
        vec![LossKind::ZeroOne],
    );
    let report = run_sweep(&config).unwrap();
    for &seed in &report.seeds {
        let (train, test) = generate(&SyntheticConfig { seed, ..config.data.clone() }).unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let c = mean(&train.labels);
        let want = 0.5 * c.abs() * (mean(&test.labels) - mean(&train.labels)).abs();
        for row in report.rows.iter().filter(|r| r.seed == seed) {
            assert!((row.gap - want).abs() <= 1e-12, "k = {}: {} vs {want}", row.k, row.gap);
        }
    }
}

#[test]
fn evaluating_on_train_gives_zero_gaps() {
    let mut config = sweep_config(
        Task::ClassificationSign,
        20,
        Variant::ALL.to_vec(),
        vec![LossKind::ZeroOne, LossKind::Mse],
    );
    config.test_on_train = true;
    let report = run_sweep(&config).unwrap();
    assert!(report.rows.iter().all(|r| r.gap == 0.0));
}

#[test]
fn threshold_on_regression_is_rejected() {
    let config = sweep_config(Task::RegressionUnit, 20, vec![Variant::Threshold], vec![LossKind::Mse]);
    let err = run_sweep(&config).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("threshold"), "{err}");
}

use hpme::verify::{run_suite, SuiteOptions};

#[test]
fn standard_suite_passes() {
    let report = run_suite(SuiteOptions::default()).unwrap();
    for check in &report.checks {
        assert!(check.pass, "{check:?}");
    }
    assert_eq!(report.checks.len(), 11);
}

#[test]
fn tamper_fails_only_the_residual_check() {
    let opts = SuiteOptions {
        cases: 12,
        tamper: true,
        ..SuiteOptions::default()
    };
    let report = run_suite(opts).unwrap();
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    assert_eq!(failed, ["residual_vanishing"]);
}

#[test]
fn fixed_seed_gives_identical_reports() {
    let opts = SuiteOptions {
        seed: 99,
        cases: 10,
        tamper: false,
    };
    let a = run_suite(opts).unwrap();
    let b = run_suite(opts).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    let c = run_suite(SuiteOptions { seed: 100, ..opts }).unwrap();
    assert_ne!(format!("{a:?}"), format!("{c:?}"));
}

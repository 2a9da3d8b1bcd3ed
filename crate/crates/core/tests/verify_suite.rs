//! The default verification suite is the machine-readable gate: every
//! check passes, in a fixed report order.

use isac_rdb::verify::{run_all, VerifyOptions};

#[test]
fn default_suite_passes_in_fixed_order() {
    let opts = VerifyOptions {
        // trimmed Monte Carlo sizes; the acceptance suite runs full size
        detector_trials: 6_000,
        ordering_draws: 400,
        ..VerifyOptions::default()
    };
    let reports = run_all(&opts);
    let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "rdb-gaussian-equality",
            "high-noise-bernoulli",
            "high-noise-nakagami",
            "stam-gaussian",
            "stam-mixture",
            "detector-vs-bound",
            "bcrb-vs-rdb-ordering",
        ]
    );
    for r in &reports {
        assert!(r.pass, "failing check: {r:?}");
        assert!((r.measured - r.reference).abs() <= r.tolerance);
    }
}

//! One line per acceptance criterion, then a single assertion over all of them.

use curved_ingham::acceptance::run_all;
use curved_ingham::riesz::DEFAULT_SEED;

#[test]
fn acceptance() {
    let outcomes = run_all(DEFAULT_SEED, |o| {
        println!(
            "{} criterion {:>2} ({}): {} [{:.1}s]",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.detail,
            o.seconds
        );
    });
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! Run the randomized verification suites programmatically: the
//! correlation bound, the two correlation routes, the masking
//! proposition, the deletion expectations, and the sampling/addition
//! balance guarantees.
//!
//! ```bash
//! cargo run --example verify_guarantees
//! ```

use fairgraph::verify::{run_verification, VerifyConfig, VerifyHooks};

fn main() -> fairgraph::Result<()> {
    let report = run_verification(
        &VerifyConfig {
            trials: 100,
            seed: 7,
        },
        &VerifyHooks::default(),
    )?;
    for p in &report.properties {
        println!(
            "{}: {}/{} trials, worst margin {:+.3e}",
            p.name,
            p.trials - p.failures,
            p.trials,
            p.worst_margin
        );
    }
    println!(
        "overall: {} (worst property {} at {:+.3e})",
        if report.passed { "PASS" } else { "FAIL" },
        report.worst_property,
        report.worst_margin
    );

    // the harness must notice a corrupted bound; this is the same hook the
    // hidden `--corrupt-c-l1` flag drives
    let corrupted = run_verification(
        &VerifyConfig {
            trials: 20,
            seed: 7,
        },
        &VerifyHooks { c_l1_scale: 0.5 },
    )?;
    let bound = corrupted
        .properties
        .iter()
        .find(|p| p.name == "theorem1_bound")
        .expect("property exists");
    println!(
        "negative control: scaled ||c||_1 by 0.5 -> theorem1_bound fails {} of {} trials",
        bound.failures, bound.trials
    );
    assert!(!corrupted.passed);
    Ok(())
}

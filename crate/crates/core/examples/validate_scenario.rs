//! Cross-check solver, thresholds and simulator on a scenario file, or on
//! the reference scenario when no path is given.

use rismac::harness::{validate, ValidateOptions};
use rismac::NetworkConfig;

fn main() -> rismac::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => NetworkConfig::load(path)?,
        None => NetworkConfig::reference_scenario(),
    };
    let opts = ValidateOptions {
        rounds: 20_000,
        ..ValidateOptions::default()
    };
    let report = validate(&cfg, None, &opts)?;
    print!("{report}");
    println!(
        "{}",
        if report.passed() {
            "all checks passed"
        } else {
            "some checks failed"
        }
    );
    Ok(())
}

//! Campaigns for all four policies at the reference scenario.

use rismac::simulator::{run_campaign, Simulation};
use rismac::{build_threshold_table, NetworkConfig, PolicyKind, Strategy};

fn main() -> rismac::Result<()> {
    let cfg = NetworkConfig::reference_scenario();
    let table = build_threshold_table(&cfg)?;
    let sim = Simulation::new(&cfg)?;
    println!("{:<18} {:>9} {:>18}", "policy", "analytic", "simulated");
    for kind in PolicyKind::ALL {
        let s = Strategy::new(kind, &cfg, Some(&table))?;
        let est = run_campaign(1, &sim, &s, 50_000)?;
        println!(
            "{:<18} {:>9.4} {:>9.4} +/- {:.4}",
            kind.name(),
            s.analytic_lambda(&cfg)?,
            est.mean,
            est.ci_halfwidth
        );
    }
    Ok(())
}

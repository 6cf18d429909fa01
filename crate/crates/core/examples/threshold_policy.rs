//! The online rule: two comparisons against precomputed thresholds per
//! decision, checked against the closed-form reference rule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rismac::channel::rate_direct;
use rismac::strategies::{algorithm1_decide, count_disagreements};
use rismac::{build_threshold_table, NetworkConfig, PairRule, ThroughputProblem};

fn main() -> rismac::Result<()> {
    let cfg = NetworkConfig::reference_scenario();
    let table = build_threshold_table(&cfg)?;
    let budget = ThroughputProblem::new(&cfg)?.budget();
    let PairRule::Probe { zeta, eta } = table.rules[0] else {
        println!("pair 1 never probes");
        return Ok(());
    };
    for h in [0.5 * zeta, zeta, 0.5 * (zeta + eta), eta, 2.0 * eta] {
        let d = algorithm1_decide(&table, 0, h, rate_direct(budget, h));
        println!("pair 1, |h| = {h:.4e}: {d:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bad = count_disagreements(&mut rng, &cfg, &table, 20_000)?;
    println!("disagreements with the reference rule per pair: {bad:?}");
    Ok(())
}

//! Solve the reference scenario offline and print the threshold table.

use std::time::Instant;

use rismac::solver::FixedPointOptions;
use rismac::{solver, NetworkConfig, PairRule};

fn main() -> rismac::Result<()> {
    let cfg = NetworkConfig::reference_scenario();
    let start = Instant::now();
    let (table, sol) = solver::build_threshold_table_with(&cfg, &FixedPointOptions::default())?;
    println!(
        "lambda* = {:.10} bit/s/Hz after {} iterations (residual {:.2e}, {:.2?})",
        table.lambda_star,
        sol.iterations,
        sol.residual,
        start.elapsed()
    );
    let floor = ((table.lambda_star * std::f64::consts::LN_2).exp_m1() / rismac::channel::linear_budget(&cfg)).sqrt();
    println!("break-even amplitude {floor:.4e}");
    for (k, rule) in table.rules.iter().enumerate() {
        match rule {
            PairRule::Probe { zeta, eta } => {
                println!("pair {}: give up <= {zeta:.4e} < probe < {eta:.4e} <= transmit", k + 1)
            }
            PairRule::DirectOnly => println!("pair {}: direct only", k + 1),
        }
    }
    Ok(())
}

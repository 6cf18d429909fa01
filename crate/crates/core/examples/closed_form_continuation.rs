//! Closed-form continuation value of probing the surface against an
//! exact-channel Monte-Carlo estimate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rismac::solver::lambda_mc;
use rismac::{NetworkConfig, ThroughputProblem};

fn main() -> rismac::Result<()> {
    let cfg = NetworkConfig::reference_scenario();
    let p = ThroughputProblem::new(&cfg)?;
    let lambda = 6.2;
    let even = p.break_even_amplitude(lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    println!("price {lambda} bit/s/Hz, break-even amplitude {even:.4e}");
    println!("  h/even   closed form   Monte Carlo (+/- 2 se)   stop now");
    for f in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0] {
        let h = f * even;
        let mc = lambda_mc(&mut rng, &cfg, 0, lambda, h, 100_000)?;
        println!(
            "  {f:>6.2}   {:>11.5}   {:>9.5} +/- {:.5}      {:>8.5}",
            p.lambda_bar(0, lambda, h),
            mc.mean,
            2.0 * mc.std_error,
            p.direct_reward(lambda, h)
        );
    }
    Ok(())
}

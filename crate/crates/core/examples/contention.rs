//! Slotted RTS/CTS contention: analytic mean time against simulation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rismac::contention::{expected_contention_time, simulate_contention, success_probability, winner_distribution};
use rismac::NetworkConfig;

fn main() -> rismac::Result<()> {
    let cfg = NetworkConfig::reference_scenario();
    println!(
        "per-slot success probability {:.4}",
        success_probability(&cfg.contention_probs)?
    );
    println!(
        "analytic mean contention time {:.2} us",
        1e6 * expected_contention_time(&cfg)?
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 200_000;
    let mut wins = vec![0u32; cfg.pairs()];
    let mut total = 0.0;
    for _ in 0..n {
        let c = simulate_contention(&mut rng, &cfg);
        wins[c.winner] += 1;
        total += c.elapsed;
    }
    println!("simulated mean over {n} contentions {:.2} us", 1e6 * total / n as f64);
    for (k, (w, p)) in wins.iter().zip(winner_distribution(&cfg.contention_probs)?).enumerate() {
        println!(
            "pair {}: won {:.4} of contentions (analytic {p:.4})",
            k + 1,
            *w as f64 / n as f64
        );
    }
    Ok(())
}

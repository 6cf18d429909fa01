//! Slotted contention against its analytic mean and winner law.

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rismac::contention::{expected_contention_time, simulate_contention, success_probability, winner_distribution};
use rismac::NetworkConfig;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn mean_contention_time_by_sampling() {
    let cfg = NetworkConfig::reference_scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 1_000_000;
    let mean = (0..n).map(|_| simulate_contention(&mut rng, &cfg).elapsed).sum::<f64>() / n as f64;
    let tau_o = expected_contention_time(&cfg).unwrap();
    assert_relative_eq!(tau_o, 295.68e-6, max_relative = 1e-4);
    assert_relative_eq!(mean, tau_o, max_relative = 0.005);
}

#[test]
fn winners_are_uniform_by_chi_squared() {
    let cfg = NetworkConfig::reference_scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let n = 1_000_000;
    let mut counts = [0u64; 8];
    for _ in 0..n {
        counts[simulate_contention(&mut rng, &cfg).winner] += 1;
    }
    let expected = n as f64 / 8.0;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(7.0).unwrap().inverse_cdf(0.99);
    assert!(stat < critical, "chi^2 = {stat} >= {critical}");
    for c in counts {
        assert_relative_eq!(c as f64 / n as f64, 0.125, max_relative = 0.01);
    }
}

#[test]
fn unequal_probabilities_follow_winner_law() {
    let mut cfg = NetworkConfig::reference_scenario();
    cfg.contention_probs = vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4];
    let law = winner_distribution(&cfg.contention_probs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n = 400_000;
    let mut counts = [0u64; 8];
    for _ in 0..n {
        counts[simulate_contention(&mut rng, &cfg).winner] += 1;
    }
    let stat: f64 = counts
        .iter()
        .zip(&law)
        .map(|(&c, &q)| (c as f64 - q * n as f64).powi(2) / (q * n as f64))
        .sum();
    assert!(stat < ChiSquared::new(7.0).unwrap().inverse_cdf(0.99), "chi^2 = {stat}");
}

proptest! {
    /// Brute-force enumeration of all sender subsets.
    #[test]
    fn success_probability_by_enumeration(p in prop::collection::vec(0.01..1.0f64, 1..8)) {
        let k = p.len();
        let mut exactly_one = 0.0;
        for mask in 0u32..(1 << k) {
            if mask.count_ones() == 1 {
                exactly_one += (0..k)
                    .map(|i| if mask >> i & 1 == 1 { p[i] } else { 1.0 - p[i] })
                    .product::<f64>();
            }
        }
        match success_probability(&p) {
            Ok(ps) => prop_assert!((ps - exactly_one).abs() < 1e-14),
            Err(_) => prop_assert!(exactly_one == 0.0),
        }
    }

    #[test]
    fn elapsed_is_at_least_the_handshake(seed in any::<u64>()) {
        let cfg = NetworkConfig::reference_scenario();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = simulate_contention(&mut rng, &cfg);
        prop_assert!(o.elapsed >= cfg.handshake_time());
        prop_assert!(o.winner < 8);
    }
}

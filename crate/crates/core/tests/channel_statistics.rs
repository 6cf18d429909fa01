//! Sampling checks of the fading model against its closed-form moments.

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rismac::channel::{self, cascaded_moments, pair_geometry, rate_direct, rate_ris, rate_ris_sum, ChannelModel};
use rismac::NetworkConfig;

fn model() -> (NetworkConfig, ChannelModel) {
    let cfg = NetworkConfig::reference_scenario();
    let m = ChannelModel::new(&cfg).unwrap();
    (cfg, m)
}

#[test]
fn reference_geometry_by_pythagoras() {
    let cfg = NetworkConfig::reference_scenario();
    let g = pair_geometry(&cfg, 0).unwrap();
    assert_eq!((g.direct, g.to_ris, g.from_ris), (150.0, 125.0, 125.0));
    let g = pair_geometry(&cfg, 7).unwrap();
    let d = (75.0f64 * 75.0 + 30.0 * 30.0).sqrt();
    assert_relative_eq!(g.to_ris, d, max_relative = 1e-15);
    assert_relative_eq!(g.from_ris, 80.777_472_107_017_56, max_relative = 1e-12);
}

#[test]
fn direct_power_by_sampling() {
    let (_, m) = model();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 1_000_000;
    let mean_sq = (0..n).map(|_| m.draw_direct(&mut rng, 0).powi(2)).sum::<f64>() / n as f64;
    assert_relative_eq!(mean_sq, 150f64.powi(-3), max_relative = 0.01);
}

#[test]
fn direct_amplitude_passes_kolmogorov_smirnov() {
    let (_, m) = model();
    let v = m.pair(3).direct_power;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 100_000;
    let mut xs: Vec<f64> = (0..n).map(|_| m.draw_direct(&mut rng, 3)).collect();
    xs.sort_by(f64::total_cmp);
    // Rayleigh with E[r^2] = v: F(r) = 1 - exp(-r^2 / v).
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = -(-x * x / v).exp_m1();
            (f - i as f64 / n as f64)
                .abs()
                .max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    let critical = 1.628 / (n as f64).sqrt();
    assert!(d < critical, "KS statistic {d} >= {critical}");
}

#[test]
fn cascaded_sum_moments_by_sampling() {
    let (cfg, m) = model();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 1_000_000;
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let x = m.draw_cascaded_sum(&mut rng, 0);
        s1 += x;
        s2 += x * x;
    }
    let mean = s1 / n as f64;
    let var = s2 / n as f64 - mean * mean;
    let cm = cascaded_moments(&cfg, 0).unwrap();
    assert_relative_eq!(mean, cm.mean, max_relative = 0.01);
    assert_relative_eq!(var, cm.std_dev.powi(2), max_relative = 0.03);
    assert_relative_eq!(cm.mean, 1.438_682_056_917_140_5e-4, max_relative = 1e-12);
    assert_relative_eq!(cm.std_dev, 2.004_399_176_736_53e-5, max_relative = 1e-12);
}

#[test]
fn per_element_second_moment_by_sampling() {
    let (_, m) = model();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let draws = 40_000;
    let mut acc = 0.0;
    for _ in 0..draws {
        acc += m.draw_cascaded(&mut rng, 0).iter().map(|x| x * x).sum::<f64>();
    }
    let per_element = acc / (draws * 32) as f64;
    assert_relative_eq!(per_element, 125f64.powf(-2.5) * 125f64.powf(-2.5), max_relative = 0.02);
}

#[test]
fn vector_and_sum_draws_agree() {
    let (_, m) = model();
    let mut a = ChaCha8Rng::seed_from_u64(15);
    let mut b = ChaCha8Rng::seed_from_u64(15);
    for k in 0..8 {
        let v: f64 = m.draw_cascaded(&mut a, k).iter().sum();
        assert_relative_eq!(v, m.draw_cascaded_sum(&mut b, k), max_relative = 1e-14);
    }
    let empty = ChannelModel::new(&NetworkConfig::reference_scenario().with_ris_elements(0)).unwrap();
    assert!(empty.draw_cascaded(&mut a, 0).is_empty());
}

#[test]
fn seeded_draws_repeat() {
    let (_, m) = model();
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        (0..50).map(|k| m.draw_direct(&mut rng, k % 8)).collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

proptest! {
    #[test]
    fn assisted_rate_dominates_direct(rho in 0.0..1e10f64, h in 0.0..1e-2f64, c in prop::collection::vec(0.0..1e-4f64, 0..40)) {
        let d = rate_direct(rho, h);
        let r = rate_ris(rho, h, &c);
        prop_assert!(r >= d);
        if c.iter().sum::<f64>() == 0.0 || rho == 0.0 {
            prop_assert_eq!(r, d);
        }
    }

    #[test]
    fn rates_increase_in_budget_and_amplitude(rho in 1.0..1e10f64, h in 1e-6..1e-2f64, c in 0.0..1e-3f64, f in 1.01..4.0f64) {
        prop_assert!(rate_direct(rho * f, h) > rate_direct(rho, h));
        prop_assert!(rate_direct(rho, h * f) > rate_direct(rho, h));
        prop_assert!(rate_ris_sum(rho * f, h, c) > rate_ris_sum(rho, h, c));
        prop_assert!(rate_ris_sum(rho, h * f, c) > rate_ris_sum(rho, h, c));
    }

    #[test]
    fn draws_are_nonnegative(seed in any::<u64>(), k in 0usize..8) {
        let (_, m) = model();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(m.draw_direct(&mut rng, k) >= 0.0);
        prop_assert!(m.draw_cascaded(&mut rng, k).iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn moments_scale_with_surface_size(m in 1usize..512) {
        let cfg = NetworkConfig::reference_scenario();
        let one = cascaded_moments(&cfg.clone().with_ris_elements(m), 2).unwrap();
        let two = cascaded_moments(&cfg.with_ris_elements(2 * m), 2).unwrap();
        prop_assert!((two.mean / one.mean - 2.0).abs() < 1e-12);
        prop_assert!((two.std_dev / one.std_dev - 2f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn link_budget_examples() {
    let cfg = NetworkConfig::reference_scenario();
    assert_relative_eq!(channel::linear_budget(&cfg), 1e8, max_relative = 1e-12);
    let cfg26 = cfg.clone().with_tx_power_dbm(26.0);
    assert_relative_eq!(
        channel::linear_budget(&cfg26),
        39_810_717.055_349_72,
        max_relative = 1e-12
    );
    let mut unit = cfg;
    unit.tx_gain = 1.0;
    unit.rx_gain = 1.0;
    unit.ref_path_loss = 1.0;
    unit.noise_power = unit.tx_power;
    assert_eq!(channel::linear_budget(&unit), 1.0);
}

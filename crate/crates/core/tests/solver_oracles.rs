//! The offline solver against independent oracles: plain bisection,
//! Monte-Carlo integration and direct evaluation.

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rismac::channel::{rate_direct, CascadedMoments};
use rismac::solver::{
    bisect_fixed_point, build_threshold_table_with, omega, pair_set_kstar, snr_for_rate, solve_eta, solve_zeta,
    FixedPointOptions,
};
use rismac::strategies::solve_lambda_b;
use rismac::{build_threshold_table, NetworkConfig, PairRule, ThresholdTable, ThroughputProblem};

fn reference() -> (NetworkConfig, ThroughputProblem) {
    let cfg = NetworkConfig::reference_scenario();
    let p = ThroughputProblem::new(&cfg).unwrap();
    (cfg, p)
}

/// Textbook bisection on the residual sign, written independently of the
/// library's fallback.
fn plain_bisection(p: &ThroughputProblem, mut lo: f64, mut hi: f64) -> f64 {
    assert!(p.residual(lo).unwrap() > 0.0 && p.residual(hi).unwrap() < 0.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if p.residual(mid).unwrap() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn iteration_matches_bisection() {
    let (_, p) = reference();
    let sol = p.solve_lambda_star(&FixedPointOptions::default()).unwrap();
    let root = plain_bisection(&p, 0.0, 20.0);
    assert!((sol.lambda - root).abs() < 1e-6, "{} vs {root}", sol.lambda);
    assert!(sol.residual.abs() < 1e-6);
    let lib = bisect_fixed_point(|l| p.residual(l), 1e-12).unwrap();
    assert!((lib.lambda - root).abs() < 1e-9);
    // Independent high-precision solve of the same residual.
    assert_relative_eq!(root, 6.197_078, max_relative = 1e-6);
}

#[test]
fn iteration_from_above_converges_to_the_same_root() {
    let (_, p) = reference();
    let root = plain_bisection(&p, 0.0, 20.0);
    let opts = FixedPointOptions {
        start: 2.0 * root,
        ..FixedPointOptions::default()
    };
    let sol = p.solve_lambda_star(&opts).unwrap();
    assert!((sol.lambda - root).abs() < 1e-6);
}

#[test]
fn residual_has_a_single_sign_change() {
    let (_, p) = reference();
    let mut prev = f64::INFINITY;
    let mut changes = 0;
    let mut last_sign = true;
    for i in 0..=120 {
        let lambda = 0.1 * i as f64;
        let g = p.residual(lambda).unwrap();
        assert!(g < prev, "residual not decreasing at {lambda}");
        if (g > 0.0) != last_sign {
            changes += 1;
            last_sign = g > 0.0;
        }
        prev = g;
    }
    assert!(p.residual(0.0).unwrap() > 0.0);
    assert_eq!(changes, 1);
}

#[test]
fn bellman_lhs_by_monte_carlo_integration() {
    let (_, p) = reference();
    let lambda = 6.2;
    let exact = p.bellman_lhs(lambda).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let n = 10_000_000;
    let mut sum = 0.0;
    for i in 0..n {
        let k = i % p.pairs();
        let u: f64 = rng.random();
        let h = (-p.direct_power(k) * (-u).ln_1p()).sqrt();
        sum += p.direct_reward(lambda, h).max(p.lambda_bar(k, lambda, h)).max(0.0);
    }
    let mc = sum / n as f64;
    assert_relative_eq!(exact, mc, max_relative = 0.002);
}

#[test]
fn omega_by_gaussian_sampling() {
    let (_, p) = reference();
    let m = p.moments(0);
    let normal = Normal::new(m.mean, m.std_dev).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for &(lambda, h) in &[(5.0, 4e-4), (6.2, 8e-4), (7.0, 1.2e-3)] {
        let c = snr_for_rate(lambda);
        let n = 1_000_000;
        let mc = (0..n)
            .map(|_| {
                let y = h + normal.sample(&mut rng);
                (1e8 * y * y).max(c)
            })
            .sum::<f64>()
            / n as f64;
        assert_relative_eq!(omega(lambda, h, m, 1e8), mc, max_relative = 0.003);
    }
}

#[test]
fn omega_keeps_the_lower_tail_of_small_surfaces() {
    // One element: the Gaussian surrogate puts about 6% of its mass below zero.
    let m = CascadedMoments {
        mean: 1e-4,
        std_dev: 1e-4 * (16.0 / std::f64::consts::PI.powi(2) - 1.0).sqrt(),
    };
    let normal = Normal::new(m.mean, m.std_dev).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let (lambda, h, rho) = (2.0, 2e-4, 1e8);
    let n = 2_000_000;
    let mc = (0..n)
        .map(|_| {
            let y = h + normal.sample(&mut rng);
            (rho * y * y).max(snr_for_rate(lambda))
        })
        .sum::<f64>()
        / n as f64;
    assert_relative_eq!(omega(lambda, h, m, rho), mc, max_relative = 0.003);
}

proptest! {
    #[test]
    fn omega_is_monotone(lambda in 0.0..12.0f64, h in 0.0..3e-3f64, mu in 1e-5..5e-4f64, sd in 1e-6..1e-4f64, step in 1e-3..0.5f64) {
        let m = CascadedMoments { mean: mu, std_dev: sd };
        let o = omega(lambda, h, m, 1e8);
        let tol = 1e-12 * o;
        prop_assert!(o >= snr_for_rate(lambda) - tol);
        prop_assert!(omega(lambda + step, h, m, 1e8) >= o - tol);
        prop_assert!(omega(lambda, h * (1.0 + step), m, 1e8) >= o - tol);
        let more = CascadedMoments { mean: mu * (1.0 + step), std_dev: sd };
        prop_assert!(omega(lambda, h, more, 1e8) >= o - tol);
    }

    #[test]
    fn lambda_bar_decreases_in_price(k in 0usize..8, lambda in 0.0..12.0f64, h in 0.0..3e-3f64, step in 1e-3..1.0f64) {
        let (_, p) = reference();
        prop_assert!(p.lambda_bar(k, lambda + step, h) < p.lambda_bar(k, lambda, h));
    }
}

#[test]
fn lambda_star_grows_with_power() {
    let mut prev = 0.0;
    for dbm in (20..=30).step_by(2) {
        let cfg = NetworkConfig::reference_scenario().with_tx_power_dbm(dbm as f64);
        let t = build_threshold_table(&cfg).unwrap();
        assert!(t.lambda_star > prev, "lambda* fell at {dbm} dBm");
        prev = t.lambda_star;
    }
}

#[test]
fn probing_set_and_thresholds_at_the_reference() {
    let (cfg, p) = reference();
    let table = build_threshold_table(&cfg).unwrap();
    let lambda = table.lambda_star;
    assert_eq!(pair_set_kstar(&cfg, lambda).unwrap(), (0..8).collect::<Vec<_>>());
    assert_eq!(table.probing_set(), (0..8).collect::<Vec<_>>());
    let floor = p.break_even_amplitude(lambda);
    assert_relative_eq!(rate_direct(p.budget(), floor), lambda, max_relative = 1e-12);
    for k in 0..8 {
        // Direct evaluation of the sign test.
        assert!(p.lambda_bar(k, lambda, floor) > 0.0);
        let PairRule::Probe { zeta, eta } = table.rules[k] else {
            panic!("pair {k} not probing")
        };
        assert!(0.0 < zeta && zeta < floor && floor < eta, "ordering at pair {k}");
        assert!(p.lambda_bar(k, lambda, zeta).abs() < 1e-10);
        assert!((p.direct_reward(lambda, eta) - p.lambda_bar(k, lambda, eta)).abs() < 1e-10);
        assert_eq!(solve_zeta(&cfg, k, lambda).unwrap(), zeta);
        assert_eq!(solve_eta(&cfg, k, lambda).unwrap(), eta);
    }
}

#[test]
fn probing_set_is_permutation_equivariant() {
    let cfg = NetworkConfig::reference_scenario();
    let mut rev = cfg.clone();
    rev.sources.reverse();
    rev.destinations.reverse();
    for lambda in [5.0, 6.2, 8.0, 10.0] {
        let a = pair_set_kstar(&cfg, lambda).unwrap();
        let mut b: Vec<usize> = pair_set_kstar(&rev, lambda)
            .unwrap()
            .into_iter()
            .map(|k| 7 - k)
            .collect();
        b.sort_unstable();
        assert_eq!(a, b, "lambda = {lambda}");
    }
}

#[test]
fn no_surface_means_no_probing() {
    let cfg = NetworkConfig::reference_scenario().with_ris_elements(0);
    let table = build_threshold_table(&cfg).unwrap();
    assert!(table.lambda_star > 0.0);
    assert!(table.probing_set().is_empty());
    assert!(solve_zeta(&cfg, 0, table.lambda_star).is_err());
}

#[test]
fn zero_budget_gives_a_degenerate_table() {
    let mut cfg = NetworkConfig::reference_scenario();
    cfg.rx_gain = 0.0;
    let table = build_threshold_table(&cfg).unwrap();
    assert_eq!(table.lambda_star, 0.0);
    assert!(table.rules.iter().all(|r| *r == PairRule::DirectOnly));
    assert_eq!(solve_lambda_b(&cfg).unwrap(), 0.0);
}

#[test]
fn solved_table_round_trips_and_is_idempotent() {
    let cfg = NetworkConfig::reference_scenario();
    let (a, sol) = build_threshold_table_with(&cfg, &FixedPointOptions::default()).unwrap();
    let b = build_threshold_table(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_text(), b.to_text());
    let back: ThresholdTable = a.to_text().parse().unwrap();
    assert_eq!(back, a);
    assert!(sol.residual.abs() < 1e-6);
}

#[test]
fn ris_stop_baseline_is_dominated() {
    let (cfg, p) = reference();
    let lambda_b = solve_lambda_b(&cfg).unwrap();
    let lambda_star = build_threshold_table(&cfg).unwrap().lambda_star;
    assert!(lambda_b > 0.0 && lambda_b <= lambda_star);
    assert!(p.probe_always_residual(lambda_b).unwrap().abs() < 1e-6);
}

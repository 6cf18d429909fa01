//! Round accounting, reproducibility and contention-count statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rismac::channel::{rate_ris_sum, ChannelModel};
use rismac::simulator::{dump_ledgers, run_campaign_on, run_round, Observation, RoundLedger, Simulation};
use rismac::solver::snr_for_rate;
use rismac::{build_threshold_table, Decision, NetworkConfig, PairRule, PolicyKind, Strategy, ThresholdTable};

fn strategies(cfg: &NetworkConfig, table: &ThresholdTable) -> Vec<Strategy> {
    PolicyKind::ALL
        .into_iter()
        .map(|k| Strategy::new(k, cfg, Some(table)).unwrap())
        .collect()
}

/// Rebuilds a ledger's totals from its path alone.
fn check_ledger(cfg: &NetworkConfig, l: &RoundLedger) {
    let direct = l.path.iter().filter(|o| **o == Observation::Direct).count();
    let probes = l.path.len() - direct;
    assert_eq!(direct as u32, l.contentions);
    assert_eq!(l.path[0], Observation::Direct);
    let released_probes = probes - usize::from(l.terminal == Decision::StopRis);
    assert!((l.probe_time - released_probes as f64 * cfg.probe_overhead()).abs() < 1e-12);
    assert!((l.total_time - (l.contention_time + l.probe_time + cfg.direct_window())).abs() < 1e-12);
    assert!(l.terminal.is_stop());
    match l.terminal {
        Decision::StopRis => assert_eq!(l.path.last(), Some(&Observation::Ris)),
        _ => assert_eq!(l.path.last(), Some(&Observation::Direct)),
    }
    assert!(l.bits >= 0.0);
    assert!(l.contention_time >= f64::from(l.contentions) * cfg.handshake_time() - 1e-15);
}

#[test]
fn ledger_identity_holds_on_every_round() {
    let cfg = NetworkConfig::reference_scenario();
    let table = build_threshold_table(&cfg).unwrap();
    let sim = Simulation::new(&cfg).unwrap();
    for s in strategies(&cfg, &table) {
        for round in 0..20_000 {
            check_ledger(&cfg, &run_round(3, round, &sim, &s).unwrap());
        }
    }
}

#[test]
fn campaigns_do_not_depend_on_worker_count() {
    let cfg = NetworkConfig::reference_scenario();
    let table = build_threshold_table(&cfg).unwrap();
    let sim = Simulation::new(&cfg).unwrap();
    let s = Strategy::new(PolicyKind::Proposed, &cfg, Some(&table)).unwrap();
    let one = run_campaign_on(9, &sim, &s, 20_000, 1).unwrap();
    for threads in [2, 3, 8] {
        let many = run_campaign_on(9, &sim, &s, 20_000, threads).unwrap();
        assert_eq!(one.mean.to_bits(), many.mean.to_bits());
        assert_eq!(one.ci_halfwidth.to_bits(), many.ci_halfwidth.to_bits());
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    dump_ledgers(&mut a, 9, &sim, &s, 500).unwrap();
    dump_ledgers(&mut b, 9, &sim, &s, 500).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a)
        .unwrap()
        .starts_with("round,contentions,path,terminal"));
}

#[test]
fn interval_shrinks_as_root_n() {
    let cfg = NetworkConfig::reference_scenario();
    let sim = Simulation::new(&cfg).unwrap();
    let a = run_campaign_on(4, &sim, &Strategy::NoWaitDirect, 25_000, 1).unwrap();
    let b = run_campaign_on(4, &sim, &Strategy::NoWaitDirect, 100_000, 1).unwrap();
    let ratio = a.ci_halfwidth / b.ci_halfwidth;
    assert!((1.6..2.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn saturated_direct_links_stop_at_once() {
    let mut cfg = NetworkConfig::reference_scenario();
    cfg.tx_power = 1e12;
    let table = ThresholdTable {
        config_fingerprint: cfg.fingerprint(),
        lambda_star: 6.2,
        rules: vec![PairRule::DirectOnly; 8],
    };
    let sim = Simulation::new(&cfg).unwrap();
    let s = Strategy::new(PolicyKind::Proposed, &cfg, Some(&table)).unwrap();
    let mut stopped = 0;
    for round in 0..2_000 {
        let l = run_round(1, round, &sim, &s).unwrap();
        stopped += usize::from(l.contentions == 1 && l.terminal == Decision::StopDirect);
    }
    // P(R_d < 6.2) at rho ~ 1e20 is below 1e-8 per pair.
    assert_eq!(stopped, 2_000);
}

#[test]
fn contentions_per_round_are_geometric() {
    let cfg = NetworkConfig::reference_scenario();
    let table = build_threshold_table(&cfg).unwrap();
    let model = ChannelModel::new(&cfg).unwrap();
    let lambda = table.lambda_star;
    let need = (snr_for_rate(lambda) / model.budget()).sqrt();

    // Stop probability of one attempt, integrating over the decision
    // regions: closed-form tail above eta plus sampled probe outcomes.
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let per_pair = 200_000;
    let mut q = 0.0;
    for k in 0..8 {
        let PairRule::Probe { zeta, eta } = table.rules[k] else {
            panic!()
        };
        let v = model.pair(k).direct_power;
        let tail = (-eta * eta / v).exp();
        let band = (-zeta * zeta / v).exp() - tail;
        let mut hits = 0;
        for _ in 0..per_pair {
            // h conditioned on (zeta, eta) by inversion.
            let u: f64 = rand::Rng::random(&mut rng);
            let h = (zeta * zeta - v * (1.0 - u * (1.0 - (-(eta * eta - zeta * zeta) / v).exp())).ln()).sqrt();
            let c = model.draw_cascaded_sum(&mut rng, k);
            hits += usize::from(rate_ris_sum(model.budget(), h, c) >= lambda);
        }
        debug_assert!(need > 0.0);
        q += (tail + band * hits as f64 / per_pair as f64) / 8.0;
    }

    let sim = Simulation::new(&cfg).unwrap();
    let s = Strategy::new(PolicyKind::Proposed, &cfg, Some(&table)).unwrap();
    let rounds = 1_000_000u64;
    let mut counts = [0u64; 3];
    let mut total = 0u64;
    for round in 0..rounds {
        let n = run_round(2, round, &sim, &s).unwrap().contentions as u64;
        total += n;
        if n <= 3 {
            counts[n as usize - 1] += 1;
        }
    }
    let mean = total as f64 / rounds as f64;
    let expect = 1.0 / q;
    // Geometric: sd of N is sqrt(1 - q) / q.
    let se = (1.0 - q).sqrt() / q / (rounds as f64).sqrt();
    assert!(
        (mean - expect).abs() < 4.0 * se + 0.002 * expect,
        "mean {mean} vs {expect}"
    );
    for (i, &c) in counts.iter().enumerate() {
        let p = q * (1.0 - q).powi(i as i32);
        let f = c as f64 / rounds as f64;
        assert!(
            (f - p).abs() < 5.0 * (p * (1.0 - p) / rounds as f64).sqrt() + 0.002,
            "P(N = {}) {f} vs {p}",
            i + 1
        );
    }
}

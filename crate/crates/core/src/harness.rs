//! Operator-level workflows behind the CLI: parameter sweeps, CSV rows and
//! the cross-check report.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{watts_to_dbm, NetworkConfig};
use crate::contention::{expected_contention_time, simulate_contention};
use crate::error::{Error, Result};
use crate::simulator::{run_campaign_on, worker_threads, Simulation, ThroughputEstimate};
use crate::solver::{build_threshold_table, omega, ContinuationSampler, PairRule, ThresholdTable, ThroughputProblem};
use crate::strategies::{count_disagreements, PolicyKind, Strategy};

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Transmit power, values in dBm.
    TxPower,
    /// Coherence time, values in ms.
    CoherenceTime,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::TxPower => "pt",
            Axis::CoherenceTime => "tau_d",
        }
    }

    /// `cfg` with the axis set to `value` (dBm or ms).
    pub fn apply(self, cfg: &NetworkConfig, value: f64) -> NetworkConfig {
        match self {
            Axis::TxPower => cfg.clone().with_tx_power_dbm(value),
            Axis::CoherenceTime => cfg.clone().with_coherence_time(value * 1e-3),
        }
    }

    /// Current axis value of `cfg` (dBm or ms).
    pub fn value_of(self, cfg: &NetworkConfig) -> f64 {
        match self {
            Axis::TxPower => watts_to_dbm(cfg.tx_power),
            Axis::CoherenceTime => cfg.coherence_time * 1e3,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pt" => Ok(Axis::TxPower),
            "tau_d" => Ok(Axis::CoherenceTime),
            _ => Err(Error::Usage(format!("unknown axis {s:?}; expected pt or tau_d"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    /// Strictly increasing.
    pub values: Vec<f64>,
    pub policies: Vec<PolicyKind>,
    pub n_rounds: u64,
    /// Every point and policy reuses this seed (common random numbers).
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Usage("sweep needs at least one value".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Usage(
                "sweep values must be finite and strictly increasing".into(),
            ));
        }
        if self.policies.is_empty() {
            return Err(Error::Usage("sweep needs at least one policy".into()));
        }
        if self.n_rounds == 0 {
            return Err(Error::Usage("sweep needs at least one round per point".into()));
        }
        Ok(())
    }
}

/// Parses `"20,22,24"` into numbers.
pub fn parse_values(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Usage(format!("not a number in value list: {s:?}")))
        })
        .collect()
}

/// One CSV line of a simulation or sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub axis: String,
    pub axis_value: f64,
    pub policy: String,
    pub analytic_lambda: Option<f64>,
    pub simulated_mean: f64,
    pub ci_halfwidth: f64,
    pub n_rounds: u64,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "axis,axis_value,policy,analytic_lambda,simulated_mean,ci_halfwidth,n_rounds,seed";

impl ResultRow {
    fn new(
        axis: Axis,
        value: f64,
        kind: PolicyKind,
        analytic: Option<f64>,
        est: ThroughputEstimate,
        seed: u64,
    ) -> Self {
        Self {
            axis: axis.name().into(),
            axis_value: value,
            policy: kind.name().into(),
            analytic_lambda: analytic,
            simulated_mean: est.mean,
            ci_halfwidth: est.ci_halfwidth,
            n_rounds: est.n_rounds,
            seed,
        }
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

/// Policy instance for `cfg`, solving whatever it needs.
fn strategy_for(kind: PolicyKind, cfg: &NetworkConfig, table: Option<&ThresholdTable>) -> Result<Strategy> {
    match (kind, table) {
        (PolicyKind::Proposed, None) => Strategy::new(kind, cfg, Some(&build_threshold_table(cfg)?)),
        _ => Strategy::new(kind, cfg, table),
    }
}

/// Single-point campaign, reported as a row on the transmit-power axis.
pub fn simulate(
    cfg: &NetworkConfig,
    kind: PolicyKind,
    table: Option<&ThresholdTable>,
    n_rounds: u64,
    seed: u64,
    threads: usize,
) -> Result<ResultRow> {
    let strategy = Strategy::new(kind, cfg, table)?;
    let sim = Simulation::new(cfg)?;
    let est = run_campaign_on(seed, &sim, &strategy, n_rounds, threads)?;
    let analytic = strategy.analytic_lambda(cfg).ok();
    Ok(ResultRow::new(
        Axis::TxPower,
        Axis::TxPower.value_of(cfg),
        kind,
        analytic,
        est,
        seed,
    ))
}

/// Re-solves and simulates every point of `spec`. Rows come out ordered by
/// axis value, then by the order of `spec.policies`.
pub fn run_sweep(cfg: &NetworkConfig, spec: &SweepSpec, threads: usize) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let jobs: Vec<(f64, PolicyKind)> = spec
        .values
        .iter()
        .flat_map(|&v| spec.policies.iter().map(move |&k| (v, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(value, kind)| {
                let point = spec.axis.apply(cfg, value);
                let strategy = strategy_for(kind, &point, None)?;
                let sim = Simulation::new(&point)?;
                // Points already run in parallel; each campaign stays on one worker.
                let est = run_campaign_on(spec.seed, &sim, &strategy, spec.n_rounds, 1)?;
                let analytic = strategy.analytic_lambda(&point).ok();
                Ok(ResultRow::new(spec.axis, value, kind, analytic, est, spec.seed))
            })
            .collect()
    })
}

/// Relative tolerance between a row's analytic and simulated throughput.
pub const STRICT_TOLERANCE: f64 = 0.03;

/// Proposed-policy rows whose simulation misses the solved `lambda*` by more
/// than [`STRICT_TOLERANCE`] (relative) plus the row's confidence half-width.
pub fn strict_violations(rows: &[ResultRow]) -> Vec<String> {
    rows.iter()
        .filter(|r| r.policy == PolicyKind::Proposed.name())
        .filter_map(|r| {
            let a = r.analytic_lambda?;
            let gap = (r.simulated_mean - a).abs();
            (gap > STRICT_TOLERANCE * a + r.ci_halfwidth).then(|| {
                format!(
                    "{}={}: simulated {:.4} vs solved {:.4} (gap {:.2}%)",
                    r.axis,
                    r.axis_value,
                    r.simulated_mean,
                    a,
                    100.0 * gap / a
                )
            })
        })
        .collect()
}

/// gnuplot script that plots `csv_name` with one curve per policy.
pub fn gnuplot_script(csv_name: &str, axis: Axis, policies: &[PolicyKind]) -> String {
    let xlabel = match axis {
        Axis::TxPower => "transmit power (dBm)",
        Axis::CoherenceTime => "coherence time (ms)",
    };
    let curves: Vec<String> = policies
        .iter()
        .map(|k| {
            format!(
                "  '{csv_name}' using (strcol(3) eq '{name}' ? $2 : 1/0):5:6 with yerrorlines title '{name}'",
                name = k.name()
            )
        })
        .collect();
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{xlabel}'\nset ylabel 'throughput (bit/s/Hz)'\nplot \\\n{}\n",
        curves.join(", \\\n")
    )
}

pub fn write_gnuplot(path: &Path, csv_path: &Path, axis: Axis, policies: &[PolicyKind]) -> Result<()> {
    let name = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| csv_path.display().to_string());
    std::fs::write(path, gnuplot_script(&name, axis, policies))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    fn push(&mut self, name: &'static str, ok: bool, detail: String) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(Check { name, status, detail });
    }

    fn skip(&mut self, name: &'static str, detail: &str) {
        self.checks.push(Check {
            name,
            status: Status::Skip,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            writeln!(f, "{tag}  {:<28} {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Sample sizes of the validation suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    pub seed: u64,
    pub rounds: u64,
    pub contentions: usize,
    pub mc_samples: usize,
    pub decisions_per_pair: usize,
    pub threads: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            rounds: 100_000,
            contentions: 200_000,
            mc_samples: 200_000,
            decisions_per_pair: 10_000,
            threads: worker_threads(),
        }
    }
}

/// Cross-checks the solver, the policy and the simulator against each
/// other. A supplied table is checked against `cfg` and against a fresh
/// solve; otherwise a fresh table is used throughout.
pub fn validate(cfg: &NetworkConfig, table: Option<&ThresholdTable>, opts: &ValidateOptions) -> Result<Report> {
    let mut report = Report::default();
    let problem = ThroughputProblem::new(cfg)?;
    let fresh = build_threshold_table(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    // Mean contention time.
    let tau_o = expected_contention_time(cfg)?;
    let mean = (0..opts.contentions)
        .map(|_| simulate_contention(&mut rng, cfg).elapsed)
        .sum::<f64>()
        / opts.contentions as f64;
    let gap = (mean / tau_o - 1.0).abs();
    report.push(
        "contention time",
        gap < 0.01,
        format!(
            "simulated {:.3} us vs {:.3} us ({:.3}%)",
            mean * 1e6,
            tau_o * 1e6,
            gap * 100.0
        ),
    );

    // Table integrity.
    let table = match table {
        Some(t) => {
            let fp = t.check_config(cfg);
            report.push(
                "table fingerprint",
                fp.is_ok(),
                fp.err().map_or_else(|| "matches config".into(), |e| e.to_string()),
            );
            let mismatched: Vec<String> = (0..t.rules.len().max(fresh.rules.len()))
                .filter(|&k| match (t.rules.get(k), fresh.rules.get(k)) {
                    (Some(a), Some(b)) => !rules_close(a, b),
                    _ => true,
                })
                .map(|k| (k + 1).to_string())
                .collect();
            let lambda_ok = relative_gap(t.lambda_star, fresh.lambda_star) < 1e-6;
            let detail = if mismatched.is_empty() {
                format!("lambda* {} vs {}", t.lambda_star, fresh.lambda_star)
            } else {
                format!("thresholds differ for pairs {}", mismatched.join(", "))
            };
            report.push("table matches fresh solve", lambda_ok && mismatched.is_empty(), detail);
            t
        }
        None => &fresh,
    };

    let kstar = table.probing_set();
    if kstar.is_empty() {
        report.skip("threshold ordering", "probing set is empty");
        report.skip("closed form vs exact channel", "probing set is empty");
    } else {
        let floor = problem.break_even_amplitude(table.lambda_star);
        let mut worst = 0.0f64;
        let mut ordered = true;
        for &k in &kstar {
            let PairRule::Probe { zeta, eta } = table.rules[k] else {
                unreachable!()
            };
            ordered &= zeta < floor && floor < eta;
            worst = worst.max(problem.lambda_bar(k, table.lambda_star, zeta).abs());
            worst = worst.max(
                (problem.direct_reward(table.lambda_star, eta) - problem.lambda_bar(k, table.lambda_star, eta)).abs(),
            );
        }
        report.push(
            "threshold ordering",
            ordered && worst < 1e-9,
            format!("{} probing pairs, worst defining residual {worst:.1e}", kstar.len()),
        );

        let sampler = ContinuationSampler::new(cfg)?;
        let w = problem.windows();
        let mut worst = 0.0f64;
        for &k in &kstar {
            let PairRule::Probe { zeta, eta } = table.rules[k] else {
                unreachable!()
            };
            for h in [zeta, 0.5 * (zeta + eta)] {
                let mc = sampler
                    .estimate(&mut rng, k, table.lambda_star, h, opts.mc_samples)
                    .mean;
                let cf = problem.lambda_bar(k, table.lambda_star, h);
                let scale = w.ris * table.lambda_star.max(crate::channel::rate_direct(problem.budget(), h));
                worst = worst.max((cf - mc).abs() / scale);
            }
        }
        report.push(
            "closed form vs exact channel",
            worst < 0.03,
            format!("worst gap {:.3}% of the reward scale", worst * 100.0),
        );
    }

    // Surrogate expectation at the break-even amplitude of pair 1.
    let m = problem.moments(0);
    if m.std_dev > 0.0 && problem.budget() > 0.0 {
        let h = problem.break_even_amplitude(table.lambda_star);
        let closed = omega(table.lambda_star, h, m, problem.budget());
        let floor = crate::solver::snr_for_rate(table.lambda_star);
        let normal = Normal::new(m.mean, m.std_dev).expect("finite moments");
        let mc = (0..opts.mc_samples)
            .map(|_| {
                let x: f64 = normal.sample(&mut rng);
                let a = h + x.max(0.0);
                (problem.budget() * a * a).max(floor)
            })
            .sum::<f64>()
            / opts.mc_samples as f64;
        let gap = relative_gap(closed, mc);
        report.push(
            "expected clipped SNR",
            gap < 0.003,
            format!("closed {closed:.5} vs sampled {mc:.5}"),
        );
    } else {
        report.skip("expected clipped SNR", "no cascaded spread");
    }

    let bad: usize = count_disagreements(&mut rng, cfg, table, opts.decisions_per_pair)?
        .iter()
        .sum();
    report.push(
        "threshold rule equivalence",
        bad == 0,
        format!("{bad} disagreements in {} draws", opts.decisions_per_pair * cfg.pairs()),
    );

    if table.lambda_star > 0.0 && table.check_config(cfg).is_ok() {
        let strategy = Strategy::new(PolicyKind::Proposed, cfg, Some(table))?;
        let est = run_campaign_on(opts.seed, &Simulation::new(cfg)?, &strategy, opts.rounds, opts.threads)?;
        let gap = relative_gap(est.mean, table.lambda_star);
        report.push(
            "simulated vs solved",
            gap < 0.03,
            format!(
                "{:.4} +- {:.4} vs {:.4} ({:.2}%)",
                est.mean,
                est.ci_halfwidth,
                table.lambda_star,
                gap * 100.0
            ),
        );
    } else {
        report.skip("simulated vs solved", "no usable table");
    }
    Ok(report)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn rules_close(a: &PairRule, b: &PairRule) -> bool {
    match (a, b) {
        (PairRule::DirectOnly, PairRule::DirectOnly) => true,
        (PairRule::Probe { zeta: z1, eta: e1 }, PairRule::Probe { zeta: z2, eta: e2 }) => {
            relative_gap(*z1, *z2) < 1e-6 && relative_gap(*e1, *e2) < 1e-6
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_serialized_fields() {
        let mut buf = Vec::new();
        write_rows(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim(), CSV_HEADER);
        let row = ResultRow {
            axis: "pt".into(),
            axis_value: 30.0,
            policy: "proposed".into(),
            analytic_lambda: None,
            simulated_mean: 1.5,
            ci_halfwidth: 0.1,
            n_rounds: 10,
            seed: 3,
        };
        let mut buf = Vec::new();
        write_rows(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("pt,30.0,proposed,,1.5,0.1,10,3"));
    }

    #[test]
    fn sweep_spec_checks() {
        let ok = SweepSpec {
            axis: Axis::TxPower,
            values: vec![20.0, 22.0],
            policies: vec![PolicyKind::NoWaitDirect],
            n_rounds: 10,
            seed: 1,
        };
        ok.validate().unwrap();
        let mut bad = ok.clone();
        bad.values = vec![22.0, 20.0];
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.n_rounds = 0;
        assert!(bad.validate().is_err());
        assert_eq!(parse_values("5, 10,15").unwrap(), vec![5.0, 10.0, 15.0]);
        assert!(parse_values("5,x").is_err());
        assert_eq!("tau_d".parse::<Axis>().unwrap(), Axis::CoherenceTime);
    }

    #[test]
    fn axis_application() {
        let cfg = NetworkConfig::reference_scenario();
        let c = Axis::CoherenceTime.apply(&cfg, 5.0);
        assert!((c.coherence_time - 5e-3).abs() < 1e-18);
        let c = Axis::TxPower.apply(&cfg, 26.0);
        assert!((Axis::TxPower.value_of(&c) - 26.0).abs() < 1e-12);
    }
}

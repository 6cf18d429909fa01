//! Decision policies: the optimal two-level rule, its pure-threshold
//! implementation, and three baselines.
//!
//! Every policy answers two questions per contention. Level 1 sees only the
//! direct amplitude and picks [`Decision::StopDirect`], [`Decision::Continue`]
//! or [`Decision::AssistRis`]. After a probe, level 2 sees the RIS-assisted
//! rate and picks [`Decision::StopRis`] or [`Decision::Continue`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::channel::{self, ChannelModel};
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::quadrature;
use crate::solver::{FixedPointOptions, PairRule, ThresholdTable, ThroughputProblem, Windows};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    /// Transmit now over the direct link.
    StopDirect,
    /// Release the channel and contend again.
    Continue,
    /// Spend a pilot and CTS to learn the cascaded channel.
    AssistRis,
    /// Transmit now with RIS assistance.
    StopRis,
}

impl Decision {
    pub fn is_stop(self) -> bool {
        matches!(self, Decision::StopDirect | Decision::StopRis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    /// Pure-threshold optimal rule.
    Proposed,
    /// Always transmit directly after winning.
    NoWaitDirect,
    /// Always probe, then always transmit with the RIS.
    NoWaitRis,
    /// Always probe, then stop iff the RIS rate clears its own threshold.
    OptimalRisStop,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::Proposed,
        PolicyKind::OptimalRisStop,
        PolicyKind::NoWaitRis,
        PolicyKind::NoWaitDirect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Proposed => "proposed",
            PolicyKind::NoWaitDirect => "no-wait-direct",
            PolicyKind::NoWaitRis => "no-wait-ris",
            PolicyKind::OptimalRisStop => "optimal-ris-stop",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        PolicyKind::ALL.into_iter().find(|k| k.name() == norm).ok_or_else(|| {
            let names: Vec<_> = PolicyKind::ALL.iter().map(|k| k.name()).collect();
            Error::Usage(format!("unknown policy {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// Source of the probing continuation value at a given price and direct
/// amplitude.
pub trait ContinuationValue {
    fn value(&mut self, k: usize, lambda: f64, h: f64) -> f64;
}

/// The closed form.
impl ContinuationValue for &ThroughputProblem {
    fn value(&mut self, k: usize, lambda: f64, h: f64) -> f64 {
        self.lambda_bar(k, lambda, h)
    }
}

/// Exact-channel Monte-Carlo estimate; for validation only.
pub struct SampledContinuation<'a, R> {
    pub sampler: &'a crate::solver::ContinuationSampler,
    pub rng: R,
    pub samples: usize,
}

impl<R: Rng> ContinuationValue for SampledContinuation<'_, R> {
    fn value(&mut self, k: usize, lambda: f64, h: f64) -> f64 {
        self.sampler.estimate(&mut self.rng, k, lambda, h, self.samples).mean
    }
}

/// Reference level-1 rule: stop directly iff the direct reward is at least
/// `max{continuation, 0}`, release iff both are negative, probe otherwise.
pub fn theorem1_decide_level1<C: ContinuationValue>(
    problem: &ThroughputProblem,
    continuation: &mut C,
    k: usize,
    h: f64,
    lambda: f64,
) -> Decision {
    let direct = problem.direct_reward(lambda, h);
    let probe = continuation.value(k, lambda, h);
    if direct >= probe.max(0.0) {
        Decision::StopDirect
    } else if direct.max(probe) < 0.0 {
        Decision::Continue
    } else {
        Decision::AssistRis
    }
}

/// Level-2 rule shared by every probing policy: stop iff the RIS rate
/// reaches the price (ties stop).
#[inline]
pub fn theorem1_decide_level2(rate_ris: f64, lambda: f64) -> Decision {
    if rate_ris >= lambda {
        Decision::StopRis
    } else {
        Decision::Continue
    }
}

/// Pure-threshold level-1 rule for pair `k`. Two comparisons for a probing
/// pair, one rate comparison otherwise.
#[inline]
pub fn algorithm1_decide(table: &ThresholdTable, k: usize, h: f64, rate_direct: f64) -> Decision {
    match table.rules[k] {
        PairRule::Probe { zeta, eta } => {
            if h >= eta {
                Decision::StopDirect
            } else if h <= zeta {
                Decision::Continue
            } else {
                Decision::AssistRis
            }
        }
        PairRule::DirectOnly => {
            if rate_direct >= table.lambda_star {
                Decision::StopDirect
            } else {
                Decision::Continue
            }
        }
    }
}

#[inline]
pub fn algorithm1_decide_ris(rate_ris: f64, lambda_star: f64) -> Decision {
    theorem1_decide_level2(rate_ris, lambda_star)
}

/// Throughput of the always-probe rule that stops on `R_r >= lambda_b`.
pub fn solve_lambda_b(cfg: &NetworkConfig) -> Result<f64> {
    Ok(ThroughputProblem::new(cfg)?
        .solve_probe_always(&FixedPointOptions::default())?
        .lambda)
}

/// A policy ready to run: kind plus whatever it solved offline.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Proposed(ThresholdTable),
    NoWaitDirect,
    NoWaitRis,
    OptimalRisStop { lambda_b: f64 },
}

impl Strategy {
    /// Builds a policy for `cfg`. The proposed policy requires a table solved
    /// for the same config.
    pub fn new(kind: PolicyKind, cfg: &NetworkConfig, table: Option<&ThresholdTable>) -> Result<Self> {
        Ok(match kind {
            PolicyKind::Proposed => {
                let table = table.ok_or_else(|| {
                    Error::Usage(
                        "the proposed policy needs a threshold table; run `rismac solve --out TABLE` and pass --table TABLE"
                            .into(),
                    )
                })?;
                table.check_config(cfg)?;
                Strategy::Proposed(table.clone())
            }
            PolicyKind::NoWaitDirect => Strategy::NoWaitDirect,
            PolicyKind::NoWaitRis => Strategy::NoWaitRis,
            PolicyKind::OptimalRisStop => Strategy::OptimalRisStop {
                lambda_b: solve_lambda_b(cfg)?,
            },
        })
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            Strategy::Proposed(_) => PolicyKind::Proposed,
            Strategy::NoWaitDirect => PolicyKind::NoWaitDirect,
            Strategy::NoWaitRis => PolicyKind::NoWaitRis,
            Strategy::OptimalRisStop { .. } => PolicyKind::OptimalRisStop,
        }
    }

    #[inline]
    pub fn level1(&self, k: usize, h: f64, rate_direct: f64) -> Decision {
        match self {
            Strategy::Proposed(table) => algorithm1_decide(table, k, h, rate_direct),
            Strategy::NoWaitDirect => Decision::StopDirect,
            Strategy::NoWaitRis | Strategy::OptimalRisStop { .. } => Decision::AssistRis,
        }
    }

    #[inline]
    pub fn level2(&self, rate_ris: f64) -> Decision {
        match self {
            Strategy::Proposed(table) => algorithm1_decide_ris(rate_ris, table.lambda_star),
            Strategy::NoWaitRis => Decision::StopRis,
            Strategy::OptimalRisStop { lambda_b } => theorem1_decide_level2(rate_ris, *lambda_b),
            // Never probes, so never asked.
            Strategy::NoWaitDirect => Decision::StopDirect,
        }
    }

    /// Model-predicted throughput. The two RIS policies use the Gaussian
    /// surrogate of the cascaded sum, as the solver does.
    pub fn analytic_lambda(&self, cfg: &NetworkConfig) -> Result<f64> {
        match self {
            Strategy::Proposed(table) => Ok(table.lambda_star),
            Strategy::OptimalRisStop { lambda_b } => Ok(*lambda_b),
            Strategy::NoWaitDirect => no_wait_throughput(cfg, false),
            Strategy::NoWaitRis => no_wait_throughput(cfg, true),
        }
    }
}

/// Renewal-reward throughput of a policy that transmits on its first
/// contention: `E[bits] / (tau_o + tau_d - tau_M1)`.
fn no_wait_throughput(cfg: &NetworkConfig, ris: bool) -> Result<f64> {
    let problem = ThroughputProblem::new(cfg)?;
    let Windows {
        direct,
        ris: ris_window,
        ..
    } = problem.windows();
    let mut bits = 0.0;
    for k in 0..problem.pairs() {
        let rate = if ris {
            mean_rate_ris(&problem, k)?
        } else {
            mean_rate_direct(&problem, k)?
        };
        bits += problem.weight(k) * rate * if ris { ris_window } else { direct };
    }
    Ok(bits / (problem.contention_time() + direct))
}

const RATE_TOL: f64 = 1e-11;

fn checked(r: quadrature::Integral) -> Result<f64> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::Quadrature {
            estimate: r.error,
            target: RATE_TOL,
        })
    }
}

/// `E[log2(1 + rho |h|^2)]` with `|h|^2` exponential.
pub(crate) fn mean_rate_direct(problem: &ThroughputProblem, k: usize) -> Result<f64> {
    let (rho, v) = (problem.budget(), problem.direct_power(k));
    checked(quadrature::integrate(
        |u: f64| channel::rate_direct(rho, (v * u).sqrt()) * (-u).exp(),
        0.0,
        45.0,
        RATE_TOL,
    ))
}

/// `E[log2(1 + rho (|h| + X)^2)]` with `X` the Gaussian surrogate of the
/// cascaded sum.
pub(crate) fn mean_rate_ris(problem: &ThroughputProblem, k: usize) -> Result<f64> {
    let (rho, v) = (problem.budget(), problem.direct_power(k));
    let m = problem.moments(k);
    if m.std_dev <= 0.0 {
        let shifted = |u: f64| channel::rate_ris_sum(rho, (v * u).sqrt(), m.mean) * (-u).exp();
        return checked(quadrature::integrate(shifted, 0.0, 45.0, RATE_TOL));
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut failed = None;
    let outer = quadrature::integrate(
        |u: f64| {
            let h = (v * u).sqrt();
            let inner = quadrature::integrate(
                |z: f64| channel::rate_ris_sum(rho, h, m.mean + m.std_dev * z) * norm * (-0.5 * z * z).exp(),
                -9.0,
                9.0,
                RATE_TOL,
            );
            if !inner.converged {
                failed = Some(inner);
            }
            inner.value * (-u).exp()
        },
        0.0,
        45.0,
        RATE_TOL,
    );
    if let Some(inner) = failed {
        checked(inner)?;
    }
    checked(outer)
}

/// Online cost check: draws `n` amplitudes per pair and counts level-1
/// disagreements between the table and the closed-form reference rule.
pub fn count_disagreements<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    table: &ThresholdTable,
    n: usize,
) -> Result<Vec<usize>> {
    let problem = ThroughputProblem::new(cfg)?;
    let model = ChannelModel::new(cfg)?;
    let mut reference = &problem;
    let lambda = table.lambda_star;
    (0..cfg.pairs())
        .map(|k| {
            if k >= table.pairs() {
                return Err(Error::Table(format!("table has no pair {}", k + 1)));
            }
            let mut bad = 0;
            for _ in 0..n {
                let h = model.draw_direct(rng, k);
                let rate = channel::rate_direct(model.budget(), h);
                let fast = algorithm1_decide(table, k, h, rate);
                let slow = theorem1_decide_level1(&problem, &mut reference, k, h, lambda);
                bad += usize::from(fast != slow);
            }
            Ok(bad)
        })
        .collect()
}

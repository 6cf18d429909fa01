//! Discrete-event rounds and throughput campaigns.
//!
//! A round repeats contention, direct observation and (optionally) an RIS
//! probe until the policy transmits. Time is charged as
//! `contention + released probes + (tau_d - tau_M1)`. A probe that ends in
//! an RIS transmission lives inside the final `tau_d - tau_M1`, since
//! `tau_d - tau_M1 = (tau_p + tau_C) + (tau_d - tau_M2)`.
//!
//! Round `i` of a campaign with seed `s` draws from ChaCha8 stream `i` under
//! key `s`, so results do not depend on the number of worker threads.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::channel::{self, ChannelModel};
use crate::config::NetworkConfig;
use crate::contention::simulate_contention;
use crate::error::{Error, Result};
use crate::solver::Windows;
use crate::strategies::{Decision, Strategy};

/// Observation levels visited in a round, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    /// Won a contention and measured the direct link.
    Direct,
    /// Probed the RIS.
    Ris,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundLedger {
    pub path: Vec<Observation>,
    /// Sum of contention durations (s).
    pub contention_time: f64,
    /// Pilot and CTS time of probes that were followed by a release (s).
    pub probe_time: f64,
    /// Delivered payload, rate times window (bit s/Hz).
    pub bits: f64,
    pub total_time: f64,
    /// [`Decision::StopDirect`] or [`Decision::StopRis`].
    pub terminal: Decision,
    pub contentions: u32,
}

impl RoundLedger {
    /// Compact path: `d` per direct observation, `r` per probe.
    pub fn path_string(&self) -> String {
        self.path
            .iter()
            .map(|o| match o {
                Observation::Direct => 'd',
                Observation::Ris => 'r',
            })
            .collect()
    }
}

/// Upper bound on contentions in one round; hitting it means the policy
/// (almost) never stops.
pub const MAX_CONTENTIONS: u32 = 10_000_000;

/// Everything a round needs besides the policy and the generator.
#[derive(Debug, Clone)]
pub struct Simulation {
    cfg: NetworkConfig,
    model: ChannelModel,
    windows: Windows,
}

impl Simulation {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg: cfg.clone(),
            model: ChannelModel::new(cfg)?,
            windows: Windows::new(cfg),
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    /// Plays one round to its transmission.
    pub fn run_round<R: Rng + ?Sized>(&self, rng: &mut R, strategy: &Strategy) -> Result<RoundLedger> {
        let budget = self.model.budget();
        let mut path = Vec::with_capacity(4);
        let mut contention_time = 0.0;
        let mut probe_time = 0.0;
        let mut contentions = 0u32;
        loop {
            if contentions == MAX_CONTENTIONS {
                return Err(Error::Stalled(u64::from(MAX_CONTENTIONS)));
            }
            let won = simulate_contention(rng, &self.cfg);
            contentions += 1;
            contention_time += won.elapsed;
            let k = won.winner;
            let h = self.model.draw_direct(rng, k);
            path.push(Observation::Direct);
            let rate_d = channel::rate_direct(budget, h);
            let (terminal, bits) = match strategy.level1(k, h, rate_d) {
                Decision::StopDirect => (Decision::StopDirect, self.windows.direct * rate_d),
                Decision::AssistRis => {
                    let sum = self.model.draw_cascaded_sum(rng, k);
                    path.push(Observation::Ris);
                    let rate_r = channel::rate_ris_sum(budget, h, sum);
                    if strategy.level2(rate_r) == Decision::StopRis {
                        (Decision::StopRis, self.windows.ris * rate_r)
                    } else {
                        probe_time += self.windows.probe;
                        continue;
                    }
                }
                Decision::Continue | Decision::StopRis => continue,
            };
            return Ok(RoundLedger {
                path,
                contention_time,
                probe_time,
                bits,
                total_time: contention_time + probe_time + self.windows.direct,
                terminal,
                contentions,
            });
        }
    }
}

/// Generator for round `round` of a campaign seeded with `seed`.
pub fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

/// One round with its campaign generator.
pub fn run_round(seed: u64, round: u64, sim: &Simulation, strategy: &Strategy) -> Result<RoundLedger> {
    sim.run_round(&mut round_rng(seed, round), strategy)
}

/// Sample throughput `sum bits / sum time` with a batch-means 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimate {
    pub mean: f64,
    /// Infinite when fewer than two batches exist.
    pub ci_halfwidth: f64,
    pub n_rounds: u64,
}

impl ThroughputEstimate {
    pub fn contains(&self, value: f64) -> bool {
        (self.mean - value).abs() <= self.ci_halfwidth
    }
}

pub const BATCHES: u64 = 100;

/// Worker count from `RISMAC_THREADS`, else rayon's default.
pub fn worker_threads() -> usize {
    std::env::var("RISMAC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Campaign on [`worker_threads`] workers.
pub fn run_campaign(seed: u64, sim: &Simulation, strategy: &Strategy, n_rounds: u64) -> Result<ThroughputEstimate> {
    run_campaign_on(seed, sim, strategy, n_rounds, worker_threads())
}

/// Campaign on exactly `threads` workers. The result is identical for every
/// thread count.
pub fn run_campaign_on(
    seed: u64,
    sim: &Simulation,
    strategy: &Strategy,
    n_rounds: u64,
    threads: usize,
) -> Result<ThroughputEstimate> {
    if n_rounds == 0 {
        return Err(Error::Usage("a campaign needs at least one round".into()));
    }
    let batches = BATCHES.min(n_rounds);
    let run = || {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let (lo, hi) = (b * n_rounds / batches, (b + 1) * n_rounds / batches);
                let (mut bits, mut time) = (0.0, 0.0);
                for round in lo..hi {
                    let l = run_round(seed, round, sim, strategy)?;
                    bits += l.bits;
                    time += l.total_time;
                }
                Ok((bits, time))
            })
            .collect::<Result<Vec<_>>>()
    };
    let sums = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker pool: {e}")))?
        .install(run)?;

    let bits: f64 = sums.iter().map(|s| s.0).sum();
    let time: f64 = sums.iter().map(|s| s.1).sum();
    let ci_halfwidth = if batches >= 2 {
        let ratios: Vec<f64> = sums.iter().map(|(b, t)| b / t).collect();
        let n = ratios.len() as f64;
        let avg = ratios.iter().sum::<f64>() / n;
        let var = ratios.iter().map(|r| (r - avg).powi(2)).sum::<f64>() / (n - 1.0);
        let t = StudentsT::new(0.0, 1.0, n - 1.0).expect("positive degrees of freedom");
        t.inverse_cdf(0.975) * (var / n).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(ThroughputEstimate {
        mean: bits / time,
        ci_halfwidth,
        n_rounds,
    })
}

/// Writes one CSV line per round, for debugging.
pub fn dump_ledgers<W: Write>(out: W, seed: u64, sim: &Simulation, strategy: &Strategy, n_rounds: u64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "round",
        "contentions",
        "path",
        "terminal",
        "contention_time",
        "probe_time",
        "bits",
        "total_time",
    ])?;
    for round in 0..n_rounds {
        let l = run_round(seed, round, sim, strategy)?;
        let terminal = if l.terminal == Decision::StopRis {
            "ris"
        } else {
            "direct"
        };
        w.write_record([
            round.to_string(),
            l.contentions.to_string(),
            l.path_string(),
            terminal.to_string(),
            l.contention_time.to_string(),
            l.probe_time.to_string(),
            l.bits.to_string(),
            l.total_time.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

//! Slotted RTS/CTS contention.
//!
//! In every slot each pair sends an RTS independently with probability
//! `p_k`. No sender: idle slot of length `delta`. Two or more: a collision
//! that wastes one RTS time. Exactly one: that pair wins after the RTS/CTS
//! handshake `tau_M1`.

use rand::Rng;

use crate::config::NetworkConfig;
use crate::error::{Error, Result};

/// `prod_k (1 - p_k)`: probability that a slot is idle.
pub fn idle_probability(p: &[f64]) -> f64 {
    p.iter().map(|pk| 1.0 - pk).product()
}

/// Probability that pair `k` is the unique sender of a slot,
/// `p_k prod_{i != k} (1 - p_i)`.
pub fn unique_sender_probabilities(p: &[f64]) -> Vec<f64> {
    (0..p.len())
        .map(|k| {
            p.iter()
                .enumerate()
                .map(|(i, &pi)| if i == k { pi } else { 1.0 - pi })
                .product()
        })
        .collect()
}

/// `p_s = sum_k p_k prod_{i != k} (1 - p_i)`.
pub fn success_probability(p: &[f64]) -> Result<f64> {
    let ps: f64 = unique_sender_probabilities(p).iter().sum();
    if ps > 0.0 {
        Ok(ps)
    } else {
        Err(Error::NoContentionSuccess)
    }
}

/// Distribution of the winner of a successful contention.
pub fn winner_distribution(p: &[f64]) -> Result<Vec<f64>> {
    let ps = success_probability(p)?;
    Ok(unique_sender_probabilities(p).into_iter().map(|q| q / ps).collect())
}

/// Mean duration of a successful contention,
/// `tau_o = tau_M1 + P_idle delta / p_s + (1 - P_idle - p_s) tau_R / p_s`.
pub fn expected_contention_time(cfg: &NetworkConfig) -> Result<f64> {
    let p = &cfg.contention_probs;
    let ps = success_probability(p)?;
    let idle = idle_probability(p);
    Ok(cfg.handshake_time() + idle * cfg.slot / ps + (1.0 - idle - ps) * cfg.rts / ps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContentionOutcome {
    /// Winning pair (0-based).
    pub winner: usize,
    /// Time from the first slot to the end of the winning handshake.
    pub elapsed: f64,
    pub idle_slots: u32,
    pub collisions: u32,
}

/// Runs slots until exactly one pair transmits an RTS.
///
/// The config must have a positive success probability (checked by
/// [`NetworkConfig::validate`]); otherwise this never returns.
pub fn simulate_contention<R: Rng + ?Sized>(rng: &mut R, cfg: &NetworkConfig) -> ContentionOutcome {
    let mut idle_slots = 0u32;
    let mut collisions = 0u32;
    loop {
        let mut senders = 0usize;
        let mut last = 0usize;
        for (k, &pk) in cfg.contention_probs.iter().enumerate() {
            if rng.random::<f64>() < pk {
                senders += 1;
                last = k;
            }
        }
        match senders {
            0 => idle_slots += 1,
            1 => {
                let elapsed = f64::from(idle_slots) * cfg.slot + f64::from(collisions) * cfg.rts + cfg.handshake_time();
                return ContentionOutcome {
                    winner: last,
                    elapsed,
                    idle_slots,
                    collisions,
                };
            }
            _ => collisions += 1,
        }
    }
}

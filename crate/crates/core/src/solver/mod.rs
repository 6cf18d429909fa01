//! Offline numerics: the closed-form continuation value, the throughput
//! fixed point `lambda*`, the probing set and the per-pair amplitude
//! thresholds.
//!
//! Everything here works on a [`ThroughputProblem`], a precomputed view of
//! a [`NetworkConfig`] holding per-pair link statistics, the payload
//! windows and the mean contention time.

mod fixed_point;
mod monte_carlo;
mod omega;
mod table;

use crate::channel::{self, CascadedMoments, PairStats};
use crate::config::NetworkConfig;
use crate::contention;
use crate::error::{Error, Result};
use crate::quadrature;

pub use fixed_point::{
    bisect_fixed_point, iterate_fixed_point, solve_lambda_star, FixedPointOptions, FixedPointSolution,
};
pub use monte_carlo::{lambda_mc, ContinuationSampler, McEstimate};
pub use omega::{omega, snr_for_rate};
pub use table::{
    build_threshold_table, build_threshold_table_with, pair_set_kstar, solve_eta, solve_zeta, PairRule, ThresholdTable,
};

/// Time windows shared by every reward expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Windows {
    /// `tau_d - tau_M1`: direct payload window, and the post-contention
    /// time charged to any transmission.
    pub direct: f64,
    /// `tau_d - tau_M2`: RIS-assisted payload window.
    pub ris: f64,
    /// `tau_p + tau_C`: cost of one RIS probe.
    pub probe: f64,
}

impl Windows {
    pub fn new(cfg: &NetworkConfig) -> Self {
        Self {
            direct: cfg.direct_window(),
            ris: cfg.ris_window(),
            probe: cfg.probe_overhead(),
        }
    }
}

/// Upper integration limit in `u = |h|^2 / E|h|^2`: the `1 - 1e-12`
/// quantile of the unit exponential.
const U_MAX: f64 = 27.631_021_115_928_547;
/// Absolute quadrature target per pair, in bit-seconds per Hz.
const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
struct PairTerms {
    direct_power: f64,
    moments: CascadedMoments,
}

/// A config reduced to what the Bellman equation needs.
#[derive(Debug, Clone)]
pub struct ThroughputProblem {
    budget: f64,
    windows: Windows,
    contention_time: f64,
    pairs: Vec<PairTerms>,
    weights: Vec<f64>,
}

impl ThroughputProblem {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        let pairs = (0..cfg.pairs())
            .map(|k| {
                let s = PairStats::new(cfg, k)?;
                Ok(PairTerms {
                    direct_power: s.direct_power,
                    moments: s.cascaded_moments(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            budget: channel::linear_budget(cfg),
            windows: Windows::new(cfg),
            contention_time: contention::expected_contention_time(cfg)?,
            pairs,
            weights: contention::winner_distribution(&cfg.contention_probs)?,
        })
    }

    pub fn pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn windows(&self) -> Windows {
        self.windows
    }

    /// Mean successful-contention time `tau_o`.
    pub fn contention_time(&self) -> f64 {
        self.contention_time
    }

    /// Probability that pair `k` wins a contention.
    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn direct_power(&self, k: usize) -> f64 {
        self.pairs[k].direct_power
    }

    pub fn moments(&self, k: usize) -> CascadedMoments {
        self.pairs[k].moments
    }

    fn check_pair(&self, k: usize) -> Result<()> {
        if k < self.pairs.len() {
            Ok(())
        } else {
            Err(Error::PairIndex {
                index: k,
                pairs: self.pairs.len(),
            })
        }
    }

    /// Net reward of stopping on the direct link, `(R_d - lambda)(tau_d - tau_M1)`.
    #[inline]
    pub fn direct_reward(&self, lambda: f64, h: f64) -> f64 {
        (channel::rate_direct(self.budget, h) - lambda) * self.windows.direct
    }

    /// Closed-form continuation value of probing the RIS,
    /// `(tau_d - tau_M2) log2(1 + Omega) - lambda (tau_d - tau_M1)`.
    #[inline]
    pub fn lambda_bar(&self, k: usize, lambda: f64, h: f64) -> f64 {
        let o = omega(lambda, h, self.pairs[k].moments, self.budget);
        self.windows.ris * o.ln_1p() / std::f64::consts::LN_2 - lambda * self.windows.direct
    }

    /// Amplitude at which the direct rate equals `lambda`,
    /// `sqrt((2^lambda - 1) / rho)`. Infinite when `rho = 0` and `lambda > 0`.
    pub fn break_even_amplitude(&self, lambda: f64) -> f64 {
        let c = snr_for_rate(lambda);
        if c <= 0.0 {
            0.0
        } else if self.budget <= 0.0 {
            f64::INFINITY
        } else {
            (c / self.budget).sqrt()
        }
    }

    /// Admissible step-size band for the fixed-point iteration,
    /// `[eps, (2 - eps) / (tau_o + tau_d - tau_M1)]`.
    pub fn step_band(&self, epsilon: f64) -> (f64, f64) {
        (epsilon, (2.0 - epsilon) / (self.contention_time + self.windows.direct))
    }

    /// Midpoint step `1 / (tau_o + tau_d - tau_M1)`.
    pub fn default_step(&self) -> f64 {
        1.0 / (self.contention_time + self.windows.direct)
    }

    /// `E_h[max{direct reward, Lambda_bar, 0}]` for one pair.
    fn pair_bellman(&self, k: usize, lambda: f64) -> Result<f64> {
        let v = self.pairs[k].direct_power;
        let amp = |u: f64| (v * u).sqrt();
        let stop = |u: f64| self.direct_reward(lambda, amp(u));
        let probe = |u: f64| self.lambda_bar(k, lambda, amp(u));
        let tail = stop(U_MAX).max(0.0) * (-U_MAX).exp();

        let h_even = self.break_even_amplitude(lambda);
        if !h_even.is_finite() {
            return Ok(0.0);
        }
        let u_even = h_even * h_even / v;
        if u_even >= U_MAX {
            return Ok(tail);
        }

        let mut pieces = Vec::with_capacity(2);
        if probe(u_even) > 0.0 {
            // 0 | probe | stop, split at the give-up and direct-transmit points.
            let u_give_up = if probe(0.0) >= 0.0 {
                0.0
            } else {
                crate::roots::bisect(probe, 0.0, u_even, 1e-15 * u_even)?
            };
            let gap = |u: f64| stop(u) - probe(u);
            let u_direct = match crate::roots::expand_upper(gap, u_even, 2.0 * u_even + 1e-3, 64) {
                Ok(hi) => crate::roots::bisect(gap, u_even, hi.min(U_MAX), 1e-15 * hi).unwrap_or(U_MAX),
                Err(_) => U_MAX,
            };
            let u_direct = u_direct.min(U_MAX);
            pieces.push(quadrature::integrate(
                |u| probe(u).max(stop(u)).max(0.0) * (-u).exp(),
                u_give_up,
                u_direct,
                QUAD_TOL,
            ));
            pieces.push(quadrature::integrate(
                |u| stop(u).max(probe(u)) * (-u).exp(),
                u_direct,
                U_MAX,
                QUAD_TOL,
            ));
        } else {
            // Probing is never better than stopping: 0 | stop.
            pieces.push(quadrature::integrate(
                |u| stop(u).max(probe(u)).max(0.0) * (-u).exp(),
                u_even,
                U_MAX,
                QUAD_TOL,
            ));
        }
        let mut value = tail;
        for p in pieces {
            if !p.converged {
                return Err(Error::Quadrature {
                    estimate: p.error,
                    target: QUAD_TOL,
                });
            }
            value += p.value;
        }
        Ok(value)
    }

    /// Left-hand side of the throughput fixed point: the winner-weighted
    /// average over pairs of `E_h[max{(R_d - lambda)(tau_d - tau_M1),
    /// Lambda_bar_k(lambda, |h|), 0}]` against the Rayleigh law of `|h_k|`.
    pub fn bellman_lhs(&self, lambda: f64) -> Result<f64> {
        let mut total = 0.0;
        for k in 0..self.pairs.len() {
            total += self.weights[k] * self.pair_bellman(k, lambda)?;
        }
        Ok(total)
    }

    /// `bellman_lhs(lambda) - lambda tau_o`; strictly decreasing, zero at `lambda*`.
    pub fn residual(&self, lambda: f64) -> Result<f64> {
        Ok(self.bellman_lhs(lambda)? - lambda * self.contention_time)
    }

    /// `E[Lambda_bar_k(lambda, |h|)]`: the value of a strategy that always
    /// probes the RIS and then stops only on the cascaded rate.
    pub fn probe_always_lhs(&self, lambda: f64) -> Result<f64> {
        let mut total = 0.0;
        for (k, pair) in self.pairs.iter().enumerate() {
            let v = pair.direct_power;
            let f = |u: f64| self.lambda_bar(k, lambda, (v * u).sqrt()) * (-u).exp();
            let r = quadrature::integrate(f, 0.0, U_MAX, QUAD_TOL);
            if !r.converged {
                return Err(Error::Quadrature {
                    estimate: r.error,
                    target: QUAD_TOL,
                });
            }
            let tail = self.lambda_bar(k, lambda, (v * U_MAX).sqrt()) * (-U_MAX).exp();
            total += self.weights[k] * (r.value + tail);
        }
        Ok(total)
    }

    pub fn probe_always_residual(&self, lambda: f64) -> Result<f64> {
        Ok(self.probe_always_lhs(lambda)? - lambda * self.contention_time)
    }

    /// Whether `Lambda_bar_k(lambda, sqrt((2^lambda - 1)/rho)) > 0`, i.e.
    /// probing can beat both alternatives for some amplitude.
    pub fn probes(&self, k: usize, lambda: f64) -> Result<bool> {
        self.check_pair(k)?;
        let h = self.break_even_amplitude(lambda);
        Ok(h.is_finite() && self.budget > 0.0 && self.lambda_bar(k, lambda, h) > 0.0)
    }

    /// Give-up threshold: root of `Lambda_bar_k(lambda, h) = 0` below the
    /// break-even amplitude. Zero when probing pays even at `h = 0`.
    pub fn zeta(&self, k: usize, lambda: f64) -> Result<f64> {
        if !self.probes(k, lambda)? {
            return Err(Error::NotProbing { pair: k });
        }
        let hi = self.break_even_amplitude(lambda);
        let f = |h: f64| self.lambda_bar(k, lambda, h);
        if f(0.0) >= 0.0 {
            return Ok(0.0);
        }
        crate::roots::bisect(f, 0.0, hi, 0.0)
    }

    /// Direct-transmit threshold: root of `direct reward = Lambda_bar_k`
    /// above the break-even amplitude.
    pub fn eta(&self, k: usize, lambda: f64) -> Result<f64> {
        if !self.probes(k, lambda)? {
            return Err(Error::NotProbing { pair: k });
        }
        let lo = self.break_even_amplitude(lambda);
        let gap = |h: f64| self.direct_reward(lambda, h) - self.lambda_bar(k, lambda, h);
        let hi = crate::roots::expand_upper(gap, lo, 2.0 * lo.max(f64::MIN_POSITIVE), 200)?;
        crate::roots::bisect(gap, lo, hi, 0.0)
    }
}

/// Closed-form continuation value for pair `k` of `cfg`.
pub fn lambda_bar(cfg: &NetworkConfig, k: usize, lambda: f64, h: f64) -> Result<f64> {
    let p = ThroughputProblem::new(cfg)?;
    p.check_pair(k)?;
    Ok(p.lambda_bar(k, lambda, h))
}

/// Bellman left-hand side for `cfg` at price `lambda`.
pub fn bellman_lhs(cfg: &NetworkConfig, lambda: f64) -> Result<f64> {
    ThroughputProblem::new(cfg)?.bellman_lhs(lambda)
}

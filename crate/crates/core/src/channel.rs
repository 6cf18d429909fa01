//! Geometry, path loss, Rayleigh fading draws and achievable rates.
//!
//! Only channel magnitudes are ever generated. With the RIS phases
//! co-phased against the direct path, every rate depends on `|h|` and the
//! per-element cascaded magnitudes `|f_m| |g_m|`, never on the phases.

use std::f64::consts::{LN_2, PI};

use rand::Rng;

use crate::config::NetworkConfig;
use crate::error::{Error, Result};

/// Link budget `rho = Pt Gt Gr beta0 / N0` (linear).
pub fn linear_budget(cfg: &NetworkConfig) -> f64 {
    cfg.tx_power * cfg.tx_gain * cfg.rx_gain * cfg.ref_path_loss / cfg.noise_power
}

/// Distances of one pair: direct, source-to-RIS and RIS-to-destination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    pub direct: f64,
    pub to_ris: f64,
    pub from_ris: f64,
}

/// Distances for pair `k` (0-based).
pub fn pair_geometry(cfg: &NetworkConfig, k: usize) -> Result<PairGeometry> {
    let (s, d) = match (cfg.sources.get(k), cfg.destinations.get(k)) {
        (Some(s), Some(d)) => (s, d),
        _ => {
            return Err(Error::PairIndex {
                index: k,
                pairs: cfg.pairs(),
            })
        }
    };
    let geom = PairGeometry {
        direct: s.distance(d),
        to_ris: s.distance(&cfg.ris),
        from_ris: cfg.ris.distance(d),
    };
    for (link, dist) in [
        ("direct", geom.direct),
        ("source-RIS", geom.to_ris),
        ("RIS-destination", geom.from_ris),
    ] {
        if dist <= 0.0 {
            return Err(Error::DegenerateGeometry { pair: k, link });
        }
    }
    Ok(geom)
}

/// What the winning destination has observed in one contention.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelObservation {
    pub pair: usize,
    /// Direct channel magnitude `|h|`.
    pub direct: f64,
    /// Per-element `|f_m| |g_m|`; present only after the RIS was probed.
    pub cascaded: Option<Vec<f64>>,
}

/// Mean and standard deviation of `sum_m |f_m| |g_m|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadedMoments {
    pub mean: f64,
    pub std_dev: f64,
}

/// Second-order statistics of one pair's links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStats {
    /// `E|h|^2 = d^-alpha1`.
    pub direct_power: f64,
    /// `E|f_m|^2 = d1^-alpha2`.
    pub first_hop_power: f64,
    /// `E|g_m|^2 = d2^-alpha2`.
    pub second_hop_power: f64,
    pub elements: usize,
}

impl PairStats {
    pub fn new(cfg: &NetworkConfig, k: usize) -> Result<Self> {
        let g = pair_geometry(cfg, k)?;
        Ok(Self {
            direct_power: g.direct.powf(-cfg.alpha_direct),
            first_hop_power: g.to_ris.powf(-cfg.alpha_ris),
            second_hop_power: g.from_ris.powf(-cfg.alpha_ris),
            elements: cfg.ris_elements,
        })
    }

    /// `mu = (M pi / 4) sqrt(v1 v2)`, `sigma^2 = M (1 - pi^2/16) v1 v2`.
    pub fn cascaded_moments(&self) -> CascadedMoments {
        let m = self.elements as f64;
        let prod = self.first_hop_power * self.second_hop_power;
        CascadedMoments {
            mean: m * PI / 4.0 * prod.sqrt(),
            std_dev: (m * (1.0 - PI * PI / 16.0) * prod).sqrt(),
        }
    }
}

/// Closed-form moments of the cascaded magnitude sum for pair `k`.
pub fn cascaded_moments(cfg: &NetworkConfig, k: usize) -> Result<CascadedMoments> {
    Ok(PairStats::new(cfg, k)?.cascaded_moments())
}

/// Rayleigh magnitude with `E[r^2] = mean_square`, by inversion.
#[inline]
pub fn rayleigh<R: Rng + ?Sized>(rng: &mut R, mean_square: f64) -> f64 {
    let u: f64 = rng.random();
    (-mean_square * (-u).ln_1p()).sqrt()
}

/// Per-pair link statistics plus the link budget; the sampling side of the
/// channel model.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    budget: f64,
    pairs: Vec<PairStats>,
}

impl ChannelModel {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        let pairs = (0..cfg.pairs())
            .map(|k| PairStats::new(cfg, k))
            .collect::<Result<_>>()?;
        Ok(Self {
            budget: linear_budget(cfg),
            pairs,
        })
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn pair(&self, k: usize) -> &PairStats {
        &self.pairs[k]
    }

    pub fn pairs(&self) -> &[PairStats] {
        &self.pairs
    }

    /// One draw of `|h_k|`.
    #[inline]
    pub fn draw_direct<R: Rng + ?Sized>(&self, rng: &mut R, k: usize) -> f64 {
        rayleigh(rng, self.pairs[k].direct_power)
    }

    /// `M` draws of `|f_m| |g_m|` for pair `k`.
    pub fn draw_cascaded<R: Rng + ?Sized>(&self, rng: &mut R, k: usize) -> Vec<f64> {
        let s = &self.pairs[k];
        (0..s.elements)
            .map(|_| {
                let f = rayleigh(rng, s.first_hop_power);
                let g = rayleigh(rng, s.second_hop_power);
                f * g
            })
            .collect()
    }

    /// `sum_m |f_m| |g_m|` without materializing the vector. Consumes the
    /// generator exactly like [`ChannelModel::draw_cascaded`].
    #[inline]
    pub fn draw_cascaded_sum<R: Rng + ?Sized>(&self, rng: &mut R, k: usize) -> f64 {
        let s = &self.pairs[k];
        let mut sum = 0.0;
        for _ in 0..s.elements {
            let f = rayleigh(rng, s.first_hop_power);
            let g = rayleigh(rng, s.second_hop_power);
            sum += f * g;
        }
        sum
    }
}

/// Direct-link rate `log2(1 + rho |h|^2)` in bits/s/Hz.
#[inline]
pub fn rate_direct(budget: f64, h: f64) -> f64 {
    (budget * h * h).ln_1p() / LN_2
}

/// RIS-assisted rate under optimal co-phasing,
/// `log2(1 + rho (|h| + sum_m |f_m||g_m|)^2)`.
pub fn rate_ris(budget: f64, h: f64, cascaded: &[f64]) -> f64 {
    rate_ris_sum(budget, h, cascaded.iter().sum())
}

#[inline]
pub fn rate_ris_sum(budget: f64, h: f64, cascaded_sum: f64) -> f64 {
    let a = h + cascaded_sum;
    (budget * a * a).ln_1p() / LN_2
}

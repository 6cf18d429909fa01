use rand::Rng;

use super::Windows;
use crate::channel::{self, ChannelModel};
use crate::config::NetworkConfig;
use crate::error::{Error, Result};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Infinite for a single sample.
    pub std_error: f64,
    pub samples: usize,
}

/// Exact-channel estimator of the probing continuation value
/// `E[max{(tau_d - tau_M2) R_r - lambda (tau_d - tau_M1), -lambda (tau_p + tau_C)}]`,
/// drawing every cascaded element instead of using the Gaussian surrogate.
#[derive(Debug, Clone)]
pub struct ContinuationSampler {
    model: ChannelModel,
    windows: Windows,
}

impl ContinuationSampler {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            model: ChannelModel::new(cfg)?,
            windows: Windows::new(cfg),
        })
    }

    pub fn estimate<R: Rng + ?Sized>(&self, rng: &mut R, k: usize, lambda: f64, h: f64, samples: usize) -> McEstimate {
        assert!(samples >= 1, "at least one sample is required");
        let budget = self.model.budget();
        let give_up = -lambda * self.windows.probe;
        let (mut mean, mut m2) = (0.0, 0.0);
        for i in 0..samples {
            let sum = self.model.draw_cascaded_sum(rng, k);
            let rate = channel::rate_ris_sum(budget, h, sum);
            let x = (self.windows.ris * rate - lambda * self.windows.direct).max(give_up);
            let delta = x - mean;
            mean += delta / (i + 1) as f64;
            m2 += delta * (x - mean);
        }
        let std_error = if samples > 1 {
            (m2 / (samples - 1) as f64 / samples as f64).sqrt()
        } else {
            f64::INFINITY
        };
        McEstimate {
            mean,
            std_error,
            samples,
        }
    }
}

/// Monte-Carlo continuation value for pair `k` of `cfg`.
pub fn lambda_mc<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    k: usize,
    lambda: f64,
    h: f64,
    samples: usize,
) -> Result<McEstimate> {
    if k >= cfg.pairs() {
        return Err(Error::PairIndex {
            index: k,
            pairs: cfg.pairs(),
        });
    }
    if samples == 0 {
        return Err(Error::Usage("lambda_mc needs at least one sample".into()));
    }
    Ok(ContinuationSampler::new(cfg)?.estimate(rng, k, lambda, h, samples))
}

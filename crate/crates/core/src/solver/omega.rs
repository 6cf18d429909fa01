//! Closed-form expected clipped SNR under a Gaussian cascaded amplitude.

use std::f64::consts::{LN_2, PI, SQRT_2};

use crate::channel::CascadedMoments;
use crate::special::{erf_diff, erfc};

/// `2^lambda - 1`: the SNR at which the rate equals `lambda`.
#[inline]
pub fn snr_for_rate(lambda: f64) -> f64 {
    (lambda * LN_2).exp_m1()
}

/// `Omega(lambda, h, mu, sigma) = E[max{rho (h + X)^2, 2^lambda - 1}]` for
/// `X ~ N(mu, sigma^2)`, in closed form.
///
/// With `Y = h + X` and `s = sqrt((2^lambda - 1) / rho)` the expectation
/// splits into the clipped band `|Y| < s` at level `2^lambda - 1` and the
/// partial second moments of `Y` above `s` and below `-s`. The band and the
/// upper tail are the usual three-term expression; the lower tail is of
/// order `Phi(-mu/sigma)` and only matters for small surfaces. With
/// `sigma = 0` or `rho = 0` the pointwise limit is returned.
pub fn omega(lambda: f64, h: f64, moments: CascadedMoments, budget: f64) -> f64 {
    let floor = snr_for_rate(lambda);
    if budget <= 0.0 {
        return floor.max(0.0);
    }
    let mean = h + moments.mean;
    let sigma = moments.std_dev;
    if sigma <= 0.0 {
        return (budget * mean * mean).max(floor);
    }
    let s = (floor / budget).sqrt();
    let scale = SQRT_2 * sigma;
    let upper = (s - mean) / scale;
    let lower = (s + mean) / scale;
    let second = mean * mean + sigma * sigma;
    let density = |z: f64| budget * sigma * (-z * z).exp() / (2.0 * PI).sqrt();

    let band = 0.5 * floor * erf_diff(upper, -lower);
    let above = density(upper) * (mean + s) + 0.5 * budget * second * erfc(upper);
    let below = density(lower) * (s - mean) + 0.5 * budget * second * erfc(lower);
    band + above + below
}

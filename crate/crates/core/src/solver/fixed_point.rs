use super::ThroughputProblem;
use crate::config::NetworkConfig;
use crate::error::{Error, Result};

/// Controls for the damped fixed-point iteration
/// `lambda <- lambda + step * (lhs(lambda) - lambda tau_o)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    /// Step size in 1/s. `None` picks `1 / (tau_o + tau_d - tau_M1)`.
    pub step: Option<f64>,
    /// Margin of the admissible band `[eps, (2 - eps) / (tau_o + tau_d - tau_M1)]`, in 1/s.
    pub epsilon: f64,
    /// Stop once `|residual|` (bit-seconds per Hz) falls below this.
    pub tol: f64,
    pub start: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            step: None,
            epsilon: 1e-3,
            tol: 1e-10,
            start: 0.0,
            max_iter: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSolution {
    pub lambda: f64,
    /// Residual at `lambda`.
    pub residual: f64,
    pub iterations: usize,
    pub step: f64,
}

/// Runs the damped iteration on a decreasing residual until
/// `|residual| < tol`. The step must lie inside `band`.
pub fn iterate_fixed_point<F>(
    mut residual: F,
    step: f64,
    band: (f64, f64),
    tol: f64,
    start: f64,
    max_iter: usize,
) -> Result<FixedPointSolution>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (low, high) = band;
    if !(step >= low && step <= high) {
        return Err(Error::StepSize { step, low, high });
    }
    let mut lambda = start.max(0.0);
    let mut g = residual(lambda)?;
    for iterations in 0..max_iter {
        if !g.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                residual: g,
            });
        }
        if g.abs() < tol {
            return Ok(FixedPointSolution {
                lambda,
                residual: g,
                iterations,
                step,
            });
        }
        lambda = (lambda + step * g).max(0.0);
        g = residual(lambda)?;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: g,
    })
}

/// Bracketing fallback that needs no step size: bisection on the sign of a
/// decreasing residual until the bracket is narrower than `lambda_tol`.
pub fn bisect_fixed_point<F>(mut residual: F, lambda_tol: f64) -> Result<FixedPointSolution>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut lo = 0.0;
    let g0 = residual(lo)?;
    if g0 <= 0.0 {
        return Ok(FixedPointSolution {
            lambda: 0.0,
            residual: g0,
            iterations: 0,
            step: 0.0,
        });
    }
    let mut hi = 1.0;
    let mut iterations = 0;
    while residual(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if hi > 1e6 {
            return Err(Error::Bracket("residual stays positive up to 1e6".into()));
        }
    }
    while hi - lo > lambda_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let lambda = 0.5 * (lo + hi);
    Ok(FixedPointSolution {
        lambda,
        residual: residual(lambda)?,
        iterations,
        step: 0.0,
    })
}

impl ThroughputProblem {
    /// Maximal average throughput `lambda*` by the damped iteration.
    pub fn solve_lambda_star(&self, opts: &FixedPointOptions) -> Result<FixedPointSolution> {
        let step = opts.step.unwrap_or_else(|| self.default_step());
        iterate_fixed_point(
            |l| self.residual(l),
            step,
            self.step_band(opts.epsilon),
            opts.tol,
            opts.start,
            opts.max_iter,
        )
    }

    /// Throughput of the always-probe stopping rule, the root of
    /// `E[Lambda_bar_k(lambda, |h|)] = lambda tau_o`.
    pub fn solve_probe_always(&self, opts: &FixedPointOptions) -> Result<FixedPointSolution> {
        let step = opts.step.unwrap_or_else(|| self.default_step());
        iterate_fixed_point(
            |l| self.probe_always_residual(l),
            step,
            self.step_band(opts.epsilon),
            opts.tol,
            opts.start,
            opts.max_iter,
        )
    }
}

pub fn solve_lambda_star(cfg: &NetworkConfig, opts: &FixedPointOptions) -> Result<FixedPointSolution> {
    ThroughputProblem::new(cfg)?.solve_lambda_star(opts)
}

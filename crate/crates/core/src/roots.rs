//! Bracketing root finders for monotone scalar functions.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]`, which must bracket a sign change. Stops when
/// the bracket is narrower than `xtol` or cannot be split further.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "f({lo:e}) = {flo:e} and f({hi:e}) = {fhi:e} do not bracket a root"
        )));
    }
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi || hi - lo <= xtol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    Ok(if flo.abs() <= fhi.abs() { lo } else { hi })
}

/// Grows `hi` geometrically from `start` until `f(hi)` has the sign
/// opposite to `f(lo)`. `start` must exceed `lo`.
pub fn expand_upper<F: FnMut(f64) -> f64>(mut f: F, lo: f64, start: f64, max_doublings: u32) -> Result<f64> {
    let sign_lo = f(lo).signum();
    let mut hi = start;
    for _ in 0..max_doublings {
        let v = f(hi);
        if v.is_nan() {
            break;
        }
        if v == 0.0 || v.signum() != sign_lo {
            return Ok(hi);
        }
        hi = lo + 2.0 * (hi - lo);
    }
    Err(Error::Bracket(format!(
        "no sign change above {lo:e} after {max_doublings} doublings"
    )))
}

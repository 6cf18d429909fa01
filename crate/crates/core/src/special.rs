//! Error functions (musl-derived, correct to about one ulp) and a
//! cancellation-safe difference.

pub use libm::{erf, erfc};

/// `erf(a) - erf(b)` without the cancellation of subtracting two values
/// close to `+-1`.
pub fn erf_diff(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        erfc(b) - erfc(a)
    } else if a < 0.0 && b < 0.0 {
        erfc(-a) - erfc(-b)
    } else {
        erf(a) - erf(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Maclaurin series, summed until the terms vanish.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 * sum.abs() {
            n += 1.0;
            term *= -x * x / n;
            sum += term / (2.0 * n + 1.0);
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    /// Continued fraction for erfc, evaluated backwards from a deep level.
    fn erfc_continued_fraction(x: f64) -> f64 {
        let mut f = 0.0;
        for k in (1..400).rev() {
            f = (k as f64 / 2.0) / (x + f);
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() / (x + f)
    }

    #[test]
    fn erf_matches_series() {
        assert_eq!(erf(0.0), 0.0);
        assert_relative_eq!(erf(1.0), 0.842_700_792_949_714_9, max_relative = 1e-14);
        for i in 1..=40 {
            let x = i as f64 * 0.05;
            assert_relative_eq!(erf(x), erf_series(x), max_relative = 1e-13);
            assert_relative_eq!(erf(-x), -erf_series(x), max_relative = 1e-13);
        }
    }

    #[test]
    fn erfc_matches_continued_fraction_in_the_tail() {
        for &x in &[2.0, 3.0, 4.5, 6.0, 10.0, 20.0] {
            assert_relative_eq!(erfc(x), erfc_continued_fraction(x), max_relative = 1e-12);
        }
        assert!((erf(6.0) - 1.0).abs() < 1e-12);
        assert!((erf(-6.0) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn difference_is_cancellation_free() {
        let (a, b) = (7.0, 6.5);
        let exact = erfc_continued_fraction(b) - erfc_continued_fraction(a);
        assert_relative_eq!(erf_diff(a, b), exact, max_relative = 1e-12);
        assert_relative_eq!(erf_diff(-b, -a), exact, max_relative = 1e-12);
        assert_relative_eq!(erf_diff(0.5, -0.5), 2.0 * erf(0.5), max_relative = 1e-15);
    }
}

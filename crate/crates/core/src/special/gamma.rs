//! Gamma function family on the real line.
//!
//! Thin layer over `libm::tgamma`/`libm::lgamma` that fixes the behaviour at
//! the poles (`gamma` returns `+∞`, `rgamma` exactly `0.0`) and keeps
//! `1/Γ(x)` finite where `Γ(x)` itself under- or overflows.

use core::f64::consts::PI;

use crate::math::{exp, round, sin};

/// Largest argument for which Γ(x) is finite in double precision.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// `sin(πx)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let mut r = x - 2.0 * round(0.5 * x);
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    if r == 0.0 {
        return 0.0;
    }
    sin(PI * r)
}

/// `cos(πx)` with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    let r = x - 2.0 * round(0.5 * x);
    // cos(πr) = sin(π(1/2 − |r|))
    sin_pi(0.5 - r.abs())
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == round(x)
}

/// The Gamma function. Returns `+∞` at the poles `0, −1, −2, …`.
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    libm::tgamma(x)
}

/// Reciprocal Gamma function `1/Γ(x)`, entire, exactly zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > GAMMA_MAX_ARG {
        return exp(-lgamma(x));
    }
    if x < 0.0 && 1.0 - x > GAMMA_MAX_ARG - 1.0 {
        // 1/Γ(x) = sin(πx)/π · Γ(1−x), which is large here
        return sin_pi(x) / PI * exp(lgamma(1.0 - x));
    }
    1.0 / libm::tgamma(x)
}

/// `ln |Γ(x)|`.
pub fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ln;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(gamma(5.0), 24.0);
        assert!(rel(gamma(0.5), crate::math::sqrt(PI)) < 1e-15);
        assert!(rel(gamma(1.5), 0.5 * crate::math::sqrt(PI)) < 1e-15);
        assert!(rel(gamma(-0.5), -2.0 * crate::math::sqrt(PI)) < 1e-15);
        assert!(rel(gamma(30.5), 4.822_696_933_490_908e31) < 1e-14);
        assert!(rel(gamma(-169.5), 5.648_220_884_223_325_3e-306) < 1e-13);
    }

    #[test]
    fn poles() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert!(gamma(-2.0).is_infinite());
    }

    #[test]
    fn lgamma_matches_log_of_gamma() {
        for &x in &[0.1, 0.7, 3.3, 14.9, 15.0, 15.1, 40.0, 120.5] {
            assert!(
                (lgamma(x) - ln(gamma(x))).abs() < 1e-13 * (1.0 + lgamma(x).abs()),
                "x={x}"
            );
        }
        // ln Γ(1000) reference
        assert!(rel(lgamma(1000.0), 5_905.220_423_209_181) < 1e-15);
    }

    #[test]
    fn rgamma_far_left() {
        // 1/Γ(−170.5) = sin(−170.5π)/π · Γ(171.5)
        let v = rgamma(-170.5);
        assert!(rel(v, -exp(lgamma(171.5)) / PI) < 1e-12);
        assert!(rgamma(-200.5).is_infinite());
    }

    #[test]
    fn sin_pi_exact_zeros() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-7.0), 0.0);
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((cos_pi(0.5)).abs() < 1e-16);
        assert!((cos_pi(1.0) + 1.0).abs() < 1e-16);
    }
}

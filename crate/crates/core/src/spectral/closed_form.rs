//! Modal responses to the forcing `ψ(t) = t^{β−1} E_{α,β}(−λ t^α)`.
//!
//! The convolution `∫_0^t τ^{α−1} E_{α,α}(−λ_k τ^α) ψ(t−τ) dτ` has the closed
//! forms below; they serve as oracles for the Duhamel quadrature.

use crate::error::{domain, Error, Result};
use crate::math::powf;
use crate::special::ml_general;

/// Relative gap `|λ−λ_k|/λ_k` below which the resonant formula is required.
pub const RESONANCE_THRESHOLD: f64 = 1e-8;

fn check(alpha: f64, beta: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(alloc::format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(domain(alloc::format!("beta must be positive, got {beta}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(alloc::format!("t must be non-negative, got {t}")));
    }
    Ok(())
}

/// `[λ E_{α,α+β}(−λt^α) − λ_k E_{α,α+β}(−λ_k t^α)] / (λ − λ_k) · t^{α+β−1}`.
pub fn closed_form_nonresonant(
    alpha: f64,
    beta: f64,
    lambda: f64,
    lambda_k: f64,
    t: f64,
) -> Result<f64> {
    check(alpha, beta, t)?;
    if !(lambda > 0.0 && lambda_k > 0.0) {
        return Err(domain("rates must be positive"));
    }
    if (lambda - lambda_k).abs() / lambda_k < RESONANCE_THRESHOLD {
        return Err(Error::Resonance { lambda, lambda_k });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let ta = powf(t, alpha);
    let g = alpha + beta;
    let a = lambda * ml_general(alpha, g, -lambda * ta)?.value;
    let b = lambda_k * ml_general(alpha, g, -lambda_k * ta)?.value;
    Ok((a - b) / (lambda - lambda_k) * powf(t, g - 1.0))
}

/// `(1/α) [E_{α,α+β−1}(−λ_k t^α) + (1−β) E_{α,α+β}(−λ_k t^α)] · t^{α+β−1}`.
pub fn closed_form_resonant(alpha: f64, beta: f64, lambda_k: f64, t: f64) -> Result<f64> {
    check(alpha, beta, t)?;
    if !(lambda_k > 0.0) {
        return Err(domain("rate must be positive"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let z = -lambda_k * powf(t, alpha);
    let g = alpha + beta;
    let e1 = ml_general(alpha, g - 1.0, z)?.value;
    let e2 = ml_general(alpha, g, z)?.value;
    Ok((e1 + (1.0 - beta) * e2) / alpha * powf(t, g - 1.0))
}

/// Dispatches on the resonance threshold.
pub fn closed_form(alpha: f64, beta: f64, lambda: f64, lambda_k: f64, t: f64) -> Result<f64> {
    if lambda_k > 0.0 && (lambda - lambda_k).abs() / lambda_k < RESONANCE_THRESHOLD {
        closed_form_resonant(alpha, beta, lambda_k, t)
    } else {
        closed_form_nonresonant(alpha, beta, lambda, lambda_k, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::exp;

    #[test]
    fn classical_limits() {
        let v = closed_form_nonresonant(1.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        assert!((v - (exp(-1.0) - exp(-2.0))).abs() < 1e-14);
        assert!((v - 0.232_544_157_934_830_6).abs() < 1e-12);
        let r = closed_form_resonant(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((r - exp(-1.0)).abs() < 1e-15);
    }

    #[test]
    fn resonance_is_continuous() {
        for &(a, b) in &[(0.5, 0.5), (0.6, 0.3), (0.8, 1.0)] {
            let lk = 4.0;
            let near = closed_form_nonresonant(a, b, lk * (1.0 + 1e-6), lk, 1.0).unwrap();
            let res = closed_form_resonant(a, b, lk, 1.0).unwrap();
            assert!(
                ((near - res) / res).abs() < 1e-4,
                "a={a} b={b}: {near} vs {res}"
            );
        }
        assert!(matches!(
            closed_form_nonresonant(0.5, 0.5, 2.0, 2.0, 1.0),
            Err(Error::Resonance { .. })
        ));
    }
}

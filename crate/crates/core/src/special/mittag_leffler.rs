//! Two-parameter Mittag-Leffler function
//!
//! ```text
//! E_{α,β}(z) = Σ_{k≥0} z^k / Γ(αk + β)
//! ```
//!
//! for real `z`, `0 < α ≤ 1`. Three evaluation branches:
//!
//! * `|z| ≤ TAYLOR_RADIUS` (and all `z > 0` while it converges): the power
//!   series, stopped once a term falls below `1e-16·|sum|` or after
//!   [`TAYLOR_MAX_TERMS`] terms.
//! * `z ≤ −asymptotic_threshold(α)`: the algebraic expansion
//!   `−Σ_{k≥1} z^{−k}/Γ(β−αk)`, truncated at its smallest term. Its remainder
//!   is of order `exp(−|z|^{1/α})`, so the threshold is `40^α`.
//! * everything in between: the Hankel-contour integral collapsed onto the
//!   branch cut of `s^{α−β}`,
//!
//!   ```text
//!   E_{α,β}(z) = 1/π ∫_0^∞ e^{−r} r^{α−β} (r^α sin πβ + z sin π(α−β))
//!                      / (r^{2α} − 2 r^α z cos πα + z²) dr,
//!   ```
//!
//!   valid for `z < 0`, `α < 1`, `β < 1 + α`. Larger `β` is brought into range
//!   with `E_{α,β+α}(z) = (E_{α,β}(z) − 1/Γ(β)) / z`.
//!
//! `α = 1` is treated separately: `E_{1,1} = exp`, and for `β > 1`
//! `E_{1,β}(z) = 1/Γ(β) ∫_0^1 exp(z(1 − v^{1/(β−1)})) dv`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::gamma::{cos_pi, lgamma, rgamma, sin_pi, GAMMA_MAX_ARG};
use crate::error::{domain, Error, Result};
use crate::math::{exp, ln, powf, powi};
use crate::quadrature::integrate;

/// Largest `|z|` for which the power series is used on the negative axis.
pub const TAYLOR_RADIUS: f64 = 1.0;
/// Term cap of the power series.
pub const TAYLOR_MAX_TERMS: usize = 500;
/// Term cap of the asymptotic expansion (and largest `p` accepted by
/// [`ml_asymptotic`]).
pub const ASYMPTOTIC_MAX_TERMS: usize = 64;
/// `|z|^{1/α}` at which the algebraic expansion takes over on the negative axis.
const ASYMPTOTIC_RATE: f64 = 40.0;
/// `z^{1/α}` beyond which the series is replaced by the exponential
/// asymptotics on the positive axis.
const POSITIVE_SERIES_LIMIT: f64 = 40.0;

/// Evaluation request `E_{α,β}(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
}

impl MlParams {
    pub fn new(alpha: f64, beta: f64, z: f64) -> Self {
        Self { alpha, beta, z }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(domain(alloc::format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(domain(alloc::format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if !self.z.is_finite() {
            return Err(domain("z must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Taylor,
    Asymptotic,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlResult {
    pub value: f64,
    pub method: Method,
    pub est_abs_error: f64,
}

/// `|z|` from which the negative-axis asymptotic branch is used.
pub fn asymptotic_threshold(alpha: f64) -> f64 {
    powf(ASYMPTOTIC_RATE, alpha)
}

/// `E_{α,β}(z)` for `α ∈ (0, 1]`, `β > 0`.
pub fn ml(params: MlParams) -> Result<MlResult> {
    params.validate()?;
    ml_general(params.alpha, params.beta, params.z)
}

/// Value-only shorthand for [`ml_general`].
pub fn ml_value(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    ml_general(alpha, beta, z).map(|r| r.value)
}

/// `E_{α,β}(z)` for any finite real `β`.
///
/// The series definition makes sense for every real `β` (the `k = 0` term
/// vanishes at the poles of Γ); formulas for derivatives and the resonant
/// solution need `β ≤ 0`.
pub fn ml_general(alpha: f64, beta: f64, z: f64) -> Result<MlResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(alloc::format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if !beta.is_finite() || !z.is_finite() {
        return Err(domain("beta and z must be finite"));
    }
    if z == 0.0 {
        return Ok(MlResult {
            value: rgamma(beta),
            method: Method::Taylor,
            est_abs_error: 0.0,
        });
    }
    let r = if alpha == 1.0 {
        ml_alpha_one(beta, z)?
    } else {
        ml_fractional(alpha, beta, z)?
    };
    if !r.value.is_finite() {
        return Err(Error::Overflow(alloc::format!(
            "E_{{{alpha},{beta}}}({z}) exceeds the double-precision range"
        )));
    }
    Ok(r)
}

fn ml_fractional(alpha: f64, beta: f64, z: f64) -> Result<MlResult> {
    if z > 0.0 {
        let growth = powf(z, 1.0 / alpha);
        if growth <= POSITIVE_SERIES_LIMIT {
            if let Some(r) = taylor(alpha, beta, z) {
                return Ok(r);
            }
        }
        return Ok(positive_asymptotic(alpha, beta, z));
    }
    let x = -z;
    if x <= TAYLOR_RADIUS {
        if let Some(r) = taylor(alpha, beta, z) {
            return Ok(r);
        }
    }
    if x >= asymptotic_threshold(alpha) {
        let a = asymptotic_optimal(alpha, beta, z);
        if a.est_abs_error <= 1e-16 * a.value.abs() || a.terms_all_vanish {
            return Ok(MlResult {
                value: a.value,
                method: Method::Asymptotic,
                est_abs_error: a.est_abs_error,
            });
        }
    }
    hankel(alpha, beta, z)
}

/// Power series. Returns `None` if it did not converge within the term cap.
fn taylor(alpha: f64, beta: f64, z: f64) -> Option<MlResult> {
    let lz = ln(z.abs());
    // Neumaier-compensated: the alternating terms cancel heavily for z < 0
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut last = 0.0;
    for k in 0..TAYLOR_MAX_TERMS {
        let arg = alpha * k as f64 + beta;
        let term = if arg < GAMMA_MAX_ARG - 1.0 {
            powi(z, k as i32) * rgamma(arg)
        } else {
            let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            sign * exp(k as f64 * lz - lgamma(arg))
        };
        let next = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - next) + term
        } else {
            (term - next) + sum
        };
        sum = next;
        last = term.abs();
        // at least a couple of terms past the start, then relative stop
        if k >= 2 && last <= 1e-16 * (sum + comp).abs() {
            return Some(MlResult {
                value: sum + comp,
                method: Method::Taylor,
                est_abs_error: last,
            });
        }
        if !sum.is_finite() {
            return None;
        }
    }
    if last <= 1e-14 * (sum + comp).abs() {
        return Some(MlResult {
            value: sum + comp,
            method: Method::Taylor,
            est_abs_error: last,
        });
    }
    None
}

struct Expansion {
    value: f64,
    est_abs_error: f64,
    terms_all_vanish: bool,
}

/// `−Σ_{k=1}^{K} z^{−k}/Γ(β−αk)` truncated where the term envelope
/// `Γ(1−β+αk)/(π|z|^k)` is smallest. The individual terms oscillate through
/// the zeros of 1/Γ, so the envelope, not the terms, picks `K`.
fn asymptotic_optimal(alpha: f64, beta: f64, z: f64) -> Expansion {
    let lz = ln(z.abs());
    let envelope = |k: usize| -> f64 {
        let kf = k as f64;
        let arg = 1.0 - beta + alpha * kf;
        let reflected = if arg > 0.0 {
            exp(lgamma(arg) - kf * lz) / PI
        } else {
            0.0
        };
        let direct = (exp(-kf * lz) * rgamma(beta - alpha * kf)).abs();
        reflected.max(direct)
    };
    let mut best = 1;
    let mut best_env = f64::INFINITY;
    for k in 1..=ASYMPTOTIC_MAX_TERMS {
        let e = envelope(k);
        if e < best_env {
            best_env = e;
            best = k;
        }
    }
    let mut sum = 0.0;
    let mut zk = 1.0;
    let mut all_zero = true;
    for k in 1..=best {
        zk /= z;
        let term = zk * rgamma(beta - alpha * k as f64);
        if term != 0.0 {
            all_zero = false;
        }
        sum -= term;
    }
    let tail = if best < ASYMPTOTIC_MAX_TERMS {
        envelope(best + 1)
    } else {
        best_env
    };
    Expansion {
        value: sum,
        est_abs_error: if all_zero { 0.0 } else { tail },
        terms_all_vanish: all_zero,
    }
}

/// Exponential asymptotics on the positive axis,
/// `E ≈ (1/α) z^{(1−β)/α} exp(z^{1/α}) − Σ_k z^{−k}/Γ(β−αk)`.
fn positive_asymptotic(alpha: f64, beta: f64, z: f64) -> MlResult {
    let r = powf(z, 1.0 / alpha);
    let lead = exp(r + (1.0 - beta) / alpha * ln(z)) / alpha;
    let tail = asymptotic_optimal(alpha, beta, z);
    MlResult {
        value: lead + tail.value,
        method: Method::Asymptotic,
        est_abs_error: tail.est_abs_error + 1e-15 * lead,
    }
}

/// Hankel-integral branch for `z < 0`, `α < 1`.
fn hankel(alpha: f64, beta: f64, z: f64) -> Result<MlResult> {
    // bring β down into (1−α, 1] where the representation holds and the
    // endpoint singularity r^{α−β} is mild
    let mut steps = 0usize;
    let mut b = beta;
    while b > 1.0 {
        b -= alpha;
        steps += 1;
    }
    let (mut value, mut err) = hankel_integral(alpha, b, z)?;
    for _ in 0..steps {
        value = (value - rgamma(b)) / z;
        err /= z.abs();
        b += alpha;
    }
    Ok(MlResult {
        value,
        method: Method::Integral,
        est_abs_error: err,
    })
}

fn hankel_integral(alpha: f64, beta: f64, z: f64) -> Result<(f64, f64)> {
    // r = u^{1/γ} absorbs r^{α−β} dr = du/γ
    let gamma_exp = 1.0 + alpha - beta;
    let inv = 1.0 / gamma_exp;
    let sb = sin_pi(beta);
    let sab = sin_pi(alpha - beta);
    let ca = cos_pi(alpha);
    let z2 = z * z;
    let integrand = |u: f64| -> f64 {
        if u <= 0.0 {
            // limit u → 0: r → 0
            return (z * sab) / z2 * inv / PI;
        }
        let r = powf(u, inv);
        let ra = powf(r, alpha);
        let num = ra * sb + z * sab;
        let den = ra * ra - 2.0 * ra * z * ca + z2;
        exp(-r) * num / den * inv / PI
    };
    let r_max: f64 = 60.0;
    let u_max = powf(r_max, gamma_exp);
    let mut breaks: Vec<f64> = Vec::with_capacity(3);
    for r in [1.0, 10.0] {
        breaks.push(powf(r, gamma_exp));
    }
    let peak = powf(-z, 1.0 / alpha);
    if peak < r_max {
        breaks.push(powf(peak, gamma_exp));
    }
    let q = integrate(integrand, 0.0, u_max, &breaks, 1e-300, 2e-15, 2000);
    if q.abs_error > 1e-11 * q.abs_value.max(f64::MIN_POSITIVE) {
        return Err(Error::NoConvergence(alloc::format!(
            "Mittag-Leffler integral for alpha={alpha}, beta={beta}, z={z}"
        )));
    }
    Ok((q.value, q.abs_error))
}

fn ml_alpha_one(beta: f64, z: f64) -> Result<MlResult> {
    if beta == 1.0 {
        return Ok(MlResult {
            value: exp(z),
            method: Method::Taylor,
            est_abs_error: 0.0,
        });
    }
    if z > 0.0 || z.abs() <= TAYLOR_RADIUS {
        if let Some(r) = taylor_alpha_one(beta, z) {
            return Ok(r);
        }
        // z large and positive
        return Ok(positive_asymptotic(1.0, beta, z));
    }
    if beta > 1.0 && beta == crate::math::round(beta) && beta <= 64.0 {
        let m = beta as usize;
        if z.abs() < beta {
            if let Some(r) = taylor_alpha_one(beta, z) {
                return Ok(r);
            }
        }
        // E_{1,k+1}(z) = (E_{1,k}(z) − 1/(k−1)!)/z from E_{1,2} = (e^z − 1)/z;
        // no cancellation once |z| ≥ β
        let mut value = libm::expm1(z) / z;
        for k in 2..m {
            value = (value - rgamma(k as f64)) / z;
        }
        return Ok(MlResult {
            value,
            method: Method::Taylor,
            est_abs_error: 4.0 * m as f64 * f64::EPSILON * value.abs(),
        });
    }
    if z <= -asymptotic_threshold(1.0) {
        // the omitted exponential term is below e^z
        let a = asymptotic_optimal(1.0, beta, z);
        if a.est_abs_error <= 1e-16 * a.value.abs() {
            return Ok(MlResult {
                value: a.value,
                method: Method::Asymptotic,
                est_abs_error: a.est_abs_error,
            });
        }
    }
    if beta > 1.0 {
        return kummer_integral(beta, z);
    }
    // upward recurrence E_{1,β}(z) = z E_{1,β+1}(z) + 1/Γ(β)
    let mut steps = 0usize;
    let mut b = beta;
    while b <= 1.0 {
        b += 1.0;
        steps += 1;
    }
    let top = if b == 1.0 {
        MlResult {
            value: exp(z),
            method: Method::Taylor,
            est_abs_error: 0.0,
        }
    } else if b == 2.0 {
        // (e^z − 1)/z exactly, avoiding an integral
        MlResult {
            value: libm::expm1(z) / z,
            method: Method::Integral,
            est_abs_error: 0.0,
        }
    } else {
        kummer_integral(b, z)?
    };
    let mut value = top.value;
    let mut err = top.est_abs_error;
    for _ in 0..steps {
        b -= 1.0;
        value = z * value + rgamma(b);
        err *= z.abs();
    }
    Ok(MlResult {
        value,
        method: top.method,
        est_abs_error: err,
    })
}

fn taylor_alpha_one(beta: f64, z: f64) -> Option<MlResult> {
    // term_{k+1} = term_k · z / (k + β), exact for α = 1
    if beta <= 0.0 && beta == crate::math::round(beta) {
        // leading terms vanish; shift: E_{1,−m}(z) = z^{m+1} E_{1,1}(z)-type
        // sums are handled by starting at k = 1 − β
        let start = (1.0 - beta) as usize;
        let mut term = powi(z, start as i32) * rgamma(start as f64 + beta);
        let mut sum = term;
        for k in start..start + TAYLOR_MAX_TERMS {
            term *= z / (k as f64 + beta);
            sum += term;
            if term.abs() <= 1e-16 * sum.abs() {
                return Some(MlResult {
                    value: sum,
                    method: Method::Taylor,
                    est_abs_error: term.abs(),
                });
            }
        }
        return None;
    }
    let mut term = rgamma(beta);
    let mut sum = term;
    for k in 0..TAYLOR_MAX_TERMS {
        term *= z / (k as f64 + beta);
        sum += term;
        if k >= 1 && term.abs() <= 1e-16 * sum.abs() {
            return Some(MlResult {
                value: sum,
                method: Method::Taylor,
                est_abs_error: term.abs(),
            });
        }
    }
    None
}

/// `E_{1,β}(z) = 1/Γ(β) ∫_0^1 exp(z (1 − v^{1/(β−1)})) dv` for `β > 1`, `z < 0`.
fn kummer_integral(beta: f64, z: f64) -> Result<MlResult> {
    let inv = 1.0 / (beta - 1.0);
    let f = |v: f64| exp(z * (1.0 - powf(v, inv)));
    // the mass sits where w = v^{1/(β−1)} is within a few 1/|z| of one;
    // breaks at 1 − w = 4^k/|z| resolve that layer geometrically
    let mut breaks = alloc::vec::Vec::new();
    let mut gap = 1.0 / z.abs();
    while gap < 1.0 {
        breaks.push(powf(1.0 - gap, beta - 1.0));
        gap *= 4.0;
    }
    let q = integrate(f, 0.0, 1.0, &breaks, 1e-300, 2e-15, 2000);
    let scale = rgamma(beta);
    Ok(MlResult {
        value: scale * q.value,
        method: Method::Integral,
        est_abs_error: scale.abs() * q.abs_error,
    })
}

/// `dE_{α,β}/dz` via `E′_{α,β}(z) = (E_{α,β−1}(z) − (β−1)E_{α,β}(z)) / (αz)`.
///
/// Singular at `z = 0`, where the derivative equals `1/Γ(α+β)`; that point is
/// rejected rather than special-cased.
pub fn ml_derivative(params: MlParams) -> Result<f64> {
    params.validate()?;
    let MlParams { alpha, beta, z } = params;
    if z == 0.0 {
        return Err(domain(
            "the derivative identity is singular at z = 0; use 1/Gamma(alpha+beta)",
        ));
    }
    let lower = ml_value(alpha, beta - 1.0, z)?;
    let this = ml_value(alpha, beta, z)?;
    Ok((lower - (beta - 1.0) * this) / (alpha * z))
}

/// Result of a fixed-length asymptotic expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticExpansion {
    pub value: f64,
    /// Indices `k` for which `β − αk` is a pole of Γ; those terms are exactly 0.
    pub degenerate_terms: Vec<usize>,
}

/// The `p`-term expansion `E_{α,β}(z) ≈ −Σ_{k=1}^{p} z^{−k}/Γ(β−αk)` for `z < 0`.
pub fn ml_asymptotic(params: MlParams, p: usize) -> Result<AsymptoticExpansion> {
    params.validate()?;
    let MlParams { alpha, beta, z } = params;
    if z >= 0.0 {
        return Err(domain(
            "the algebraic expansion applies on the negative axis only",
        ));
    }
    if z > -1.0 {
        return Err(domain(alloc::format!(
            "|z| = {} is too small for the expansion",
            -z
        )));
    }
    if p == 0 || p > ASYMPTOTIC_MAX_TERMS {
        return Err(domain(alloc::format!(
            "number of terms must lie in 1..={ASYMPTOTIC_MAX_TERMS}"
        )));
    }
    let mut value = 0.0;
    let mut zk = 1.0;
    let mut degenerate_terms = Vec::new();
    for k in 1..=p {
        zk /= z;
        let c = rgamma(beta - alpha * k as f64);
        if c == 0.0 {
            degenerate_terms.push(k);
        }
        value -= zk * c;
    }
    Ok(AsymptoticExpansion {
        value,
        degenerate_terms,
    })
}

/// Empirical constant `M = max_x |E_α(−x)|(1+x)` over the grid.
pub fn ml_bound_check(alpha: f64, x_grid: &[f64]) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(
            "the bound |E_a(-x)| <= M/(1+x) is stated for 0 < alpha < 1",
        ));
    }
    let mut m: f64 = 0.0;
    for &x in x_grid {
        if !(x >= 0.0) {
            return Err(domain(alloc::format!("grid point {x} is negative")));
        }
        let v = ml_value(alpha, 1.0, -x)?;
        m = m.max(v.abs() * (1.0 + x));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn integer_beta_at_order_one() {
        for &z in &[-5.0, -30.0, -200.0, -1e4] {
            let e3 = (libm::expm1(z) - z) / (z * z);
            assert!(rel(ml_value(1.0, 3.0, z).unwrap(), e3) < 1e-14, "z={z}");
            for &beta in &[2.0, 3.0, 7.0] {
                let fast = ml_value(1.0, beta, z).unwrap();
                let slow = kummer_integral(beta, z).unwrap().value;
                assert!(
                    rel(fast, slow) < 1e-12,
                    "beta={beta} z={z}: {fast} vs {slow}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ml(MlParams::new(0.0, 1.0, -1.0)).is_err());
        assert!(ml(MlParams::new(1.2, 1.0, -1.0)).is_err());
        assert!(ml(MlParams::new(0.5, 0.0, -1.0)).is_err());
        assert!(ml(MlParams::new(0.5, 1.0, f64::NAN)).is_err());
    }

    #[test]
    fn elementary_cases() {
        let r = ml(MlParams::new(1.0, 1.0, -1.0)).unwrap();
        assert!(rel(r.value, 0.367_879_441_171_442_33) < 1e-15);
        let r = ml(MlParams::new(1.0, 2.0, 1.0)).unwrap();
        assert!(rel(r.value, 1.718_281_828_459_045) < 1e-14);
        // E_{1,2}(z) = (e^z − 1)/z on the integral branch
        for &z in &[-2.0, -7.5, -40.0, -500.0] {
            let v = ml_value(1.0, 2.0, z).unwrap();
            assert!(rel(v, (exp(z) - 1.0) / z) < 1e-13, "z={z}");
        }
        // E_{1,3}(z) = (e^z − 1 − z)/z²
        for &z in &[-2.0, -30.0] {
            let v = ml_value(1.0, 3.0, z).unwrap();
            assert!(rel(v, (exp(z) - 1.0 - z) / (z * z)) < 1e-13, "z={z}");
        }
        // E_{1,0}(z) = z e^z
        assert!(rel(ml_value(1.0, 0.0, -3.0).unwrap(), -3.0 * exp(-3.0)) < 1e-14);
    }

    #[test]
    fn value_at_zero_is_reciprocal_gamma() {
        for &(a, b) in &[(0.3, 0.7), (0.5, 1.0), (0.9, 2.5), (1.0, 3.0)] {
            let r = ml(MlParams::new(a, b, 0.0)).unwrap();
            assert!(rel(r.value, 1.0 / gamma(b)) < 1e-14);
        }
    }

    #[test]
    fn half_order_matches_erfc_identity() {
        // E_{1/2}(−x) = e^{x²} erfc(x)
        for i in 0..=100 {
            let x = 0.1 * i as f64;
            let expect = exp(x * x) * libm::erfc(x);
            let v = ml_value(0.5, 1.0, -x).unwrap();
            assert!(rel(v, expect) < 1e-10, "x={x} v={v} expect={expect}");
        }
    }

    #[test]
    fn branches_agree_in_overlap() {
        for &alpha in &[0.3, 0.5, 0.7, 0.9] {
            for &beta in &[alpha, 1.0, alpha + 1.0, 0.4] {
                let t = asymptotic_threshold(alpha);
                for &f in &[1.0, 1.3, 2.0] {
                    let z = -t * f;
                    let a = asymptotic_optimal(alpha, beta, z);
                    let h = hankel(alpha, beta, z).unwrap();
                    assert!(
                        rel(a.value, h.value) < 1e-8,
                        "a={alpha} b={beta} z={z}: {} vs {}",
                        a.value,
                        h.value
                    );
                }
            }
        }
    }

    #[test]
    fn taylor_and_integral_agree_near_switch() {
        for &alpha in &[0.2, 0.5, 0.8, 0.95] {
            for &beta in &[alpha, 1.0, 1.0 + alpha, 0.25, -0.3] {
                let z = -TAYLOR_RADIUS;
                let t = taylor(alpha, beta, z).unwrap().value;
                let h = hankel(alpha, beta, z).unwrap().value;
                assert!(
                    (t - h).abs() < 1e-12 * (1.0 + t.abs()),
                    "a={alpha} b={beta}: {t} vs {h}"
                );
            }
        }
    }

    #[test]
    fn derivative_identity_examples() {
        let d = ml_derivative(MlParams::new(1.0, 1.0, -1.0)).unwrap();
        assert!(rel(d, exp(-1.0)) < 1e-14);
        // d/dz (e^z − 1)/z at z = 1 equals 1
        let d = ml_derivative(MlParams::new(1.0, 2.0, 1.0)).unwrap();
        assert!(rel(d, 1.0) < 1e-13);
        assert!(ml_derivative(MlParams::new(0.5, 1.0, 0.0)).is_err());
    }

    #[test]
    fn asymptotic_one_term_example() {
        let r = ml_asymptotic(MlParams::new(0.5, 1.0, -100.0), 1).unwrap();
        assert!(rel(r.value, 1.0 / (100.0 * gamma(0.5))) < 1e-15);
        assert!(r.degenerate_terms.is_empty());
        let r = ml_asymptotic(MlParams::new(1.0, 1.0, -30.0), 3).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.degenerate_terms, alloc::vec![1, 2, 3]);
        assert!(ml_asymptotic(MlParams::new(0.5, 1.0, 2.0), 1).is_err());
    }

    #[test]
    fn positive_axis_growth_and_overflow() {
        let v = ml_value(0.5, 1.0, 3.0).unwrap();
        // E_{1/2}(x) = e^{x²} erfc(−x)
        assert!(rel(v, exp(9.0) * libm::erfc(-3.0)) < 1e-13);
        let v = ml_value(0.5, 1.0, 10.0).unwrap();
        assert!(rel(v, exp(100.0) * libm::erfc(-10.0)) < 1e-13);
        assert!(matches!(
            ml(MlParams::new(0.5, 1.0, 30.0)),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn bound_constant() {
        assert!(ml_bound_check(0.9, &[0.0]).unwrap() >= 1.0);
        assert!(ml_bound_check(1.0, &[0.0]).is_err());
    }
}

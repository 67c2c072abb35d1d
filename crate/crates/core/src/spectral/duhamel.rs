//! Product integration of the modal Duhamel integral
//!
//! ```text
//! D(t_n) = ∫_0^{t_n} K(τ) f(t_n − τ) dτ,   K(τ) = τ^{α−1} E_{α,α}(−λ τ^α),
//! ```
//!
//! on a uniform grid. On each step the source is replaced by a linear
//! function and integrated exactly against `K` through the moments
//!
//! ```text
//! A(τ) = ∫_0^τ K = τ^α E_{α,α+1}(−λτ^α),   C(τ) = ∫_0^τ A = τ^{α+1} E_{α,α+2}(−λτ^α).
//! ```
//!
//! Far from `t = 0` the linear piece interpolates the nodal source values.
//! On the first [`NEAR_STEPS`] steps it is the `L²` best linear fit built from
//! quadrature moments of the source, so sources with an integrable
//! singularity at `t = 0` (such as `t^{β−1}`, `β < 1`) are handled. The first
//! step uses geometrically graded panels towards the origin.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::math::powf;
use crate::quadrature::{GL8_NODES, GL8_WEIGHTS};
use crate::special::ml_general;

/// Steps near `t = 0` whose source is fitted from moments.
pub const NEAR_STEPS: usize = 64;
/// Dyadic levels of the graded quadrature on the first step.
const LEVELS: usize = 200;

/// Where the source must be sampled and how the samples are used.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    dt: f64,
    n_steps: usize,
    near: usize,
}

impl Schedule {
    pub fn new(horizon: f64, n_steps: usize) -> Self {
        Self {
            dt: horizon / n_steps as f64,
            n_steps,
            near: NEAR_STEPS.min(n_steps),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Sample times: nodes `t_1..t_N`, then Gauss points of steps
    /// `1..near`, then the graded panels of step 0.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt;
        let mut t: Vec<f64> = (1..=self.n_steps).map(|n| n as f64 * dt).collect();
        for m in 1..self.near {
            let a = m as f64 * dt;
            t.extend(GL8_NODES.iter().map(|&u| a + 0.5 * dt * (u + 1.0)));
        }
        for (a, b) in graded_panels(dt) {
            t.extend(GL8_NODES.iter().map(|&u| a + 0.5 * (b - a) * (u + 1.0)));
        }
        t
    }

    /// Linear pieces `(left, right)` of the source on every step, from its
    /// samples at [`Schedule::times`].
    pub fn pieces(&self, samples: &[f64]) -> Vec<(f64, f64)> {
        let dt = self.dt;
        let n = self.n_steps;
        let node = |k: usize| samples[k - 1];
        let mut out = vec![(0.0, 0.0); n];
        let mut off = n;
        for (m, piece) in out.iter_mut().enumerate().take(self.near).skip(1) {
            let a = m as f64 * dt;
            let (mut mu0, mut mu1) = (0.0, 0.0);
            for k in 0..8 {
                let s = a + 0.5 * dt * (GL8_NODES[k] + 1.0);
                let w = 0.5 * dt * GL8_WEIGHTS[k] * samples[off + k];
                mu0 += w;
                mu1 += w * (s - a);
            }
            off += 8;
            *piece = fit(mu0, mu1, dt);
        }
        // graded first step with a geometric tail for the unresolved core
        let (mut mu0, mut mu1) = (0.0, 0.0);
        let (mut prev0, mut last0) = (0.0, 0.0);
        for (level, (a, b)) in graded_panels(dt).enumerate() {
            let (mut c0, mut c1) = (0.0, 0.0);
            for k in 0..8 {
                let s = a + 0.5 * (b - a) * (GL8_NODES[k] + 1.0);
                let w = 0.5 * (b - a) * GL8_WEIGHTS[k] * samples[off + k];
                c0 += w;
                c1 += w * s;
            }
            off += 8;
            mu0 += c0;
            mu1 += c1;
            if level + 1 == LEVELS {
                prev0 = last0;
            }
            last0 = c0;
        }
        if prev0 != 0.0 {
            let rho = last0 / prev0;
            if rho > 0.0 && rho < 1.0 {
                mu0 += last0 * rho / (1.0 - rho);
            }
        }
        if n > 0 {
            out[0] = fit(mu0, mu1, dt);
        }
        for (m, piece) in out.iter_mut().enumerate().skip(self.near) {
            *piece = (node(m), node(m + 1));
        }
        out
    }
}

/// Dyadic panels `[dt 2^{−k−1}, dt 2^{−k}]`, `k = 0..LEVELS`.
fn graded_panels(dt: f64) -> impl Iterator<Item = (f64, f64)> {
    (0..LEVELS).map(move |k| {
        let b = dt * powf(0.5, k as f64);
        (0.5 * b, b)
    })
}

/// Best linear fit `a + b s` on `[0, dt]` (local variable) from `μ₀ = ∫f`,
/// `μ₁ = ∫ s f`. Returned as the values at both ends.
fn fit(mu0: f64, mu1: f64, dt: f64) -> (f64, f64) {
    let a = 4.0 * mu0 / dt - 6.0 * mu1 / (dt * dt);
    let b = 12.0 * mu1 / (dt * dt * dt) - 6.0 * mu0 / (dt * dt);
    (a, a + b * dt)
}

/// Exact weights of kernel step `τ ∈ [j dt, (j+1) dt]`, `j = 0..N−1`, for
/// rate `lambda`. The pair multiplies the (left, right) end values of the
/// source piece that meets this step.
pub fn kernel_weights(alpha: f64, lambda: f64, dt: f64, n_steps: usize) -> Result<Vec<(f64, f64)>> {
    let mut a = Vec::with_capacity(n_steps + 1);
    let mut c = Vec::with_capacity(n_steps + 1);
    for j in 0..=n_steps {
        let tau = j as f64 * dt;
        if j == 0 {
            a.push(0.0);
            c.push(0.0);
            continue;
        }
        let ta = powf(tau, alpha);
        let z = -lambda * ta;
        a.push(ta * ml_general(alpha, alpha + 1.0, z)?.value);
        c.push(tau * ta * ml_general(alpha, alpha + 2.0, z)?.value);
    }
    Ok((0..n_steps)
        .map(|j| {
            let total = a[j + 1] - a[j];
            // ∫ K(τ) (τ_{j+1} − τ) dτ / dt
            let lin = (c[j + 1] - c[j] - dt * a[j]) / dt;
            (total - lin, lin)
        })
        .collect())
}

/// `D(t_n)`, `n = 0..N`, from kernel weights and source pieces.
///
/// Source step `m` meets kernel step `j = n − 1 − m`.
pub fn convolve(weights: &[(f64, f64)], pieces: &[(f64, f64)]) -> Vec<f64> {
    let n_steps = pieces.len();
    let mut out = vec![0.0; n_steps + 1];
    for (n, o) in out.iter_mut().enumerate().skip(1) {
        let mut s = 0.0;
        for m in 0..n {
            let (wl, wr) = weights[n - 1 - m];
            let (fl, fr) = pieces[m];
            s += wl * fl + wr * fr;
        }
        *o = s;
    }
    out
}

//! Discrete fractional operators on uniform time grids.
//!
//! * [`caputo_l1`]: L1 scheme for the Caputo derivative `(I^{1−α} f′)(t)`,
//!   accurate to `O(dt^{2−α})` for `C²` inputs.
//! * [`rl_integral`]: product-trapezoidal rule for the Riemann-Liouville
//!   integral `(I^α f)(t) = 1/Γ(α) ∫_0^t (t−τ)^{α−1} f(τ) dτ`.
//! * [`caputo_power`]: the exact rule `D^α t^β = Γ(1+β)/Γ(1−α+β) t^{β−α}`.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::math::powf;
use crate::special::{gamma, rgamma};

/// Time nodes `0 = t_0 < t_1 < … < t_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t: Vec<f64>,
    dt: Option<f64>,
}

impl TimeGrid {
    /// `n_steps + 1` equispaced nodes on `[0, horizon]`.
    pub fn uniform(horizon: f64, n_steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Grid(alloc::format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if n_steps == 0 {
            return Err(Error::Grid("need at least one time step".into()));
        }
        let dt = horizon / n_steps as f64;
        let t = (0..=n_steps).map(|k| k as f64 * dt).collect();
        Ok(Self { t, dt: Some(dt) })
    }

    /// Arbitrary strictly increasing nodes starting at zero.
    pub fn from_nodes(t: Vec<f64>) -> Result<Self> {
        if t.first() != Some(&0.0) {
            return Err(Error::Grid("first node must be exactly 0".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().any(|x| !x.is_finite()) {
            return Err(Error::Grid(
                "nodes must be finite and strictly increasing".into(),
            ));
        }
        let n = t.len() - 1;
        let dt = if n > 0 { Some(t[n] / n as f64) } else { None };
        let uniform = dt.is_some_and(|h| {
            t.iter()
                .enumerate()
                .all(|(k, &x)| (x - k as f64 * h).abs() <= 1e-12 * x.abs().max(h))
        });
        Ok(Self {
            t,
            dt: if uniform { dt } else { None },
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.dt.is_some()
    }

    /// Step size of a uniform grid.
    pub fn dt(&self) -> Option<f64> {
        self.dt
    }
}

/// Function values on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("sampled values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Output of [`caputo_l1`]: the derivative at `t_1 … t_N`. Node `t_0` has no
/// value.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoSamples {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl CaputoSamples {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Derivative at node `n`; `None` for `n = 0` or out of range.
    pub fn get(&self, n: usize) -> Option<f64> {
        if n == 0 {
            None
        } else {
            self.values.get(n - 1).copied()
        }
    }

    /// Values at `t_1 … t_N`.
    pub fn available(&self) -> &[f64] {
        &self.values
    }

    /// Complete the samples with a value at `t = 0`.
    pub fn with_origin(&self, at_zero: f64) -> Result<SampledFunction> {
        let mut values = Vec::with_capacity(self.values.len() + 1);
        values.push(at_zero);
        values.extend_from_slice(&self.values);
        SampledFunction::new(self.grid.clone(), values)
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(alloc::format!(
            "order must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// L1 weights `b_j = (j+1)^{1−α} − j^{1−α}`, `j = 0 … n−1`.
pub(crate) fn l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let e = 1.0 - alpha;
    let mut prev = 0.0;
    (0..n)
        .map(|j| {
            let next = powf((j + 1) as f64, e);
            let b = next - prev;
            prev = next;
            b
        })
        .collect()
}

/// Apply the L1 sum to raw samples on a uniform grid with step `dt`.
/// Entry `n−1` of the result is the derivative at node `n`.
pub(crate) fn l1_apply(values: &[f64], alpha: f64, dt: f64, weights: &[f64]) -> Vec<f64> {
    let n_nodes = values.len();
    let scale = rgamma(2.0 - alpha) / powf(dt, alpha);
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    (1..n_nodes)
        .map(|n| {
            // Σ_{j=0}^{n−1} b_j (f_{n−j} − f_{n−j−1})
            let acc: f64 = weights[..n]
                .iter()
                .zip(diffs[..n].iter().rev())
                .map(|(b, d)| b * d)
                .sum();
            scale * acc
        })
        .collect()
}

/// L1-scheme Caputo derivative of order `alpha` at the nodes `t_1 … t_N`.
pub fn caputo_l1(f: &SampledFunction, alpha: f64) -> Result<CaputoSamples> {
    check_order(alpha)?;
    let dt = f
        .grid
        .dt()
        .ok_or_else(|| Error::Grid("the L1 scheme needs a uniform grid".into()))?;
    if f.grid.len() < 3 {
        return Err(Error::Grid("the L1 scheme needs at least 3 nodes".into()));
    }
    let weights = l1_weights(alpha, f.values.len() - 1);
    let values = l1_apply(&f.values, alpha, dt, &weights);
    Ok(CaputoSamples {
        grid: f.grid.clone(),
        values,
    })
}

/// `D^α t^β = Γ(1+β)/Γ(1−α+β) · t^{β−α}` for `β > 0`.
pub fn caputo_power(alpha: f64, beta: f64, t: f64) -> Result<f64> {
    check_order(alpha)?;
    if !(beta > 0.0) {
        return Err(domain(alloc::format!(
            "the power rule needs beta > 0, got {beta}"
        )));
    }
    if !(t >= 0.0) {
        return Err(domain(alloc::format!("t must be nonnegative, got {t}")));
    }
    let c = gamma(1.0 + beta) * rgamma(1.0 - alpha + beta);
    if t == 0.0 {
        return Ok(if beta > alpha {
            0.0
        } else if beta == alpha {
            c
        } else {
            f64::INFINITY
        });
    }
    Ok(c * powf(t, beta - alpha))
}

/// Product-trapezoidal Riemann-Liouville integral of order `0 ≤ alpha < 1`
/// at every node. `alpha = 0` is the identity.
pub fn rl_integral(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    if !(alpha >= 0.0) {
        return Err(domain(alloc::format!(
            "integral order must be nonnegative, got {alpha}"
        )));
    }
    if alpha >= 1.0 {
        return Err(domain(alloc::format!(
            "integral order must be below 1, got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    let dt = f
        .grid
        .dt()
        .ok_or_else(|| Error::Grid("the product rule needs a uniform grid".into()))?;
    let v = &f.values;
    let a1 = alpha + 1.0;
    // c_m = (m+1)^{α+1} − 2 m^{α+1} + (m−1)^{α+1} for interior nodes at lag m
    let pw: Vec<f64> = (0..=v.len()).map(|m| powf(m as f64, a1)).collect();
    let scale = powf(dt, alpha) * rgamma(alpha + 2.0);
    let mut out = Vec::with_capacity(v.len());
    out.push(0.0);
    for n in 1..v.len() {
        let nf = n as f64;
        let mut acc = (pw[n - 1] - (nf - alpha - 1.0) * powf(nf, alpha)) * v[0];
        for (j, &vj) in v.iter().enumerate().take(n).skip(1) {
            let m = n - j;
            acc += (pw[m + 1] - 2.0 * pw[m] + pw[m - 1]) * vj;
        }
        acc += v[n];
        out.push(scale * acc);
    }
    SampledFunction::new(f.grid.clone(), out)
}

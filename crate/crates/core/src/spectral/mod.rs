//! Eigenfunction-series solution of the initial-boundary-value problem.
//!
//! After the boundary lift (see [`homogenize`]) each modal coefficient obeys
//! the fractional relaxation equation `D^α T_i = −λ_i T_i + F₁ᵢ(t)`, whose
//! solution is
//!
//! ```text
//! T_i(t) = c_i E_α(−λ_i t^α) + ∫_0^t τ^{α−1} E_{α,α}(−λ_i τ^α) F₁ᵢ(t − τ) dτ,
//! ```
//!
//! with `c_i = (v₀, X_i)` and `F₁ᵢ(t) = (F₁(·, t), X_i)`. The homogeneous part
//! is evaluated exactly; the Duhamel part is tabulated on the time grid by
//! product integration ([`duhamel`]) and interpolated linearly in between.

mod closed_form;
pub mod duhamel;
mod homogenize;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use closed_form::{
    closed_form, closed_form_nonresonant, closed_form_resonant, RESONANCE_THRESHOLD,
};
pub use homogenize::{
    homogenize, BoundaryCaputo, BoundaryLift, Homogenized, ModalSource, TransformedSource,
    COMPATIBILITY_TOL,
};

use crate::error::{domain, Error, Result};
use crate::expr::{Expr, Var};
use crate::math::{exp, ln, powf};
use crate::special::ml_general;
use crate::sturm_liouville::{
    coefficient_decay_diagnostic, decay_plateaus, project, solve_eigen, EigenSystem,
    OperatorCoefficients,
};

pub const DEFAULT_N_MODES: usize = 64;
pub const DEFAULT_GRID_SIZE: usize = 2001;
pub const DEFAULT_TIME_STEPS: usize = 1024;

/// Full problem description.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    /// Fractional order, `0 < α ≤ 1`.
    pub alpha: f64,
    pub coeffs: OperatorCoefficients,
    /// Time horizon `T`.
    pub horizon: f64,
    /// `u₀(x)`.
    pub u0: Expr,
    /// `u(0, t)`.
    pub phi1: Expr,
    /// `u(l, t)`.
    pub phi2: Expr,
    /// `F(x, t)`.
    pub source: Expr,
    pub n_modes: usize,
    /// Spatial grid nodes, endpoints included.
    pub grid_size: usize,
    pub n_time_steps: usize,
}

impl ProblemSpec {
    /// Zero data and default resolution.
    pub fn new(alpha: f64, coeffs: OperatorCoefficients, horizon: f64) -> Self {
        Self {
            alpha,
            coeffs,
            horizon,
            u0: Expr::Num(0.0),
            phi1: Expr::Num(0.0),
            phi2: Expr::Num(0.0),
            source: Expr::Num(0.0),
            n_modes: DEFAULT_N_MODES,
            grid_size: DEFAULT_GRID_SIZE,
            n_time_steps: DEFAULT_TIME_STEPS,
        }
    }

    pub fn with_initial(mut self, u0: Expr) -> Self {
        self.u0 = u0;
        self
    }

    pub fn with_boundary(mut self, phi1: Expr, phi2: Expr) -> Self {
        self.phi1 = phi1;
        self.phi2 = phi2;
        self
    }

    pub fn with_source(mut self, source: Expr) -> Self {
        self.source = source;
        self
    }

    pub fn with_resolution(
        mut self,
        n_modes: usize,
        grid_size: usize,
        n_time_steps: usize,
    ) -> Self {
        self.n_modes = n_modes;
        self.grid_size = grid_size;
        self.n_time_steps = n_time_steps;
        self
    }

    pub fn length(&self) -> f64 {
        self.coeffs.length()
    }

    /// Zero source and zero boundary data.
    pub fn is_homogeneous(&self) -> bool {
        self.source.is_zero() && self.phi1.is_zero() && self.phi2.is_zero()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(domain(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(domain(format!(
                "time horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.n_modes == 0 || self.grid_size < 3 || self.n_time_steps == 0 {
            return Err(domain(
                "n_modes, grid_size and n_time_steps must be positive (grid_size >= 3)",
            ));
        }
        if self.u0.uses(Var::T) {
            return Err(domain("u0 must not depend on t"));
        }
        for (name, e) in [("phi1", &self.phi1), ("phi2", &self.phi2)] {
            if e.uses(Var::X) {
                return Err(domain(format!("{name} must not depend on x")));
            }
        }
        let l = self.length();
        for (side, x, phi) in [("left", 0.0, &self.phi1), ("right", l, &self.phi2)] {
            let initial = self.u0.eval(x, 0.0)?;
            let boundary = phi.eval(x, 0.0)?;
            if (initial - boundary).abs()
                > COMPATIBILITY_TOL * initial.abs().max(boundary.abs()).max(1.0)
            {
                return Err(Error::Compatibility {
                    side,
                    initial,
                    boundary,
                });
            }
        }
        Ok(())
    }
}

/// Runs independent numbered tasks; implementations may parallelise but must
/// return results in index order.
pub trait Executor: Sync {
    fn map(
        &self,
        n: usize,
        task: &(dyn Fn(usize) -> Result<Vec<f64>> + Sync),
    ) -> Result<Vec<Vec<f64>>>;
}

/// Runs tasks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map(
        &self,
        n: usize,
        task: &(dyn Fn(usize) -> Result<Vec<f64>> + Sync),
    ) -> Result<Vec<Vec<f64>>> {
        (0..n).map(task).collect()
    }
}

/// A space-time function that can be sampled.
pub trait Field {
    fn value(&self, x: f64, t: f64) -> Result<f64>;

    /// Values on the tensor grid, time-major: `out[k * xs.len() + j] = u(xs[j], ts[k])`.
    fn sample_grid(&self, xs: &[f64], ts: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(xs.len() * ts.len());
        for &t in ts {
            for &x in xs {
                out.push(self.value(x, t)?);
            }
        }
        Ok(out)
    }
}

impl<F: Fn(f64, f64) -> Result<f64>> Field for F {
    fn value(&self, x: f64, t: f64) -> Result<f64> {
        self(x, t)
    }
}

/// Truncated series solution; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSolution {
    sys: EigenSystem,
    alpha: f64,
    horizon: f64,
    n_time_steps: usize,
    c: Vec<f64>,
    /// Row-major `n_modes × (N+1)`; empty when the Duhamel part vanishes.
    duhamel: Vec<f64>,
    /// `max_t |F₁ᵢ(t)|` over the time nodes, per mode.
    source_peak: Vec<f64>,
    lift: BoundaryLift,
    warnings: Vec<String>,
}

/// `u₀ ≡ 0`-free homogeneous problem: `F ≡ 0`, `φ₁ ≡ φ₂ ≡ 0`.
pub fn solve_homogeneous(spec: &ProblemSpec) -> Result<SpectralSolution> {
    if !spec.is_homogeneous() {
        return Err(Error::Precondition(
            "solve_homogeneous needs F = 0 and zero boundary data".into(),
        ));
    }
    solve(spec)
}

pub fn solve(spec: &ProblemSpec) -> Result<SpectralSolution> {
    solve_with(spec, &Sequential)
}

/// Solves with a caller-supplied executor for the per-time source sampling
/// and the per-mode convolutions.
pub fn solve_with(spec: &ProblemSpec, exec: &dyn Executor) -> Result<SpectralSolution> {
    spec.validate()?;
    let sys = solve_eigen(&spec.coeffs, spec.n_modes, spec.grid_size)?;
    solve_on(spec, sys, exec)
}

/// Solves on a precomputed eigen-system (which must match the problem's domain).
pub fn solve_on(
    spec: &ProblemSpec,
    sys: EigenSystem,
    exec: &dyn Executor,
) -> Result<SpectralSolution> {
    spec.validate()?;
    if (sys.length() - spec.length()).abs() > 1e-12 * spec.length() {
        return Err(domain(
            "eigen-system length differs from the problem domain",
        ));
    }
    let sys = if sys.n_modes() > spec.n_modes {
        sys.truncated(spec.n_modes)
    } else {
        sys
    };
    let grid = sys.grid();
    let hom = homogenize(spec, &grid)?;
    let c = project(&hom.v0, &sys)?;
    let mut warnings = Vec::new();
    if !decay_plateaus(&c, sys.lambdas())? {
        let (s1, _) = coefficient_decay_diagnostic(&c, sys.lambdas())?;
        warnings.push(format!(
            "partial sums of sum lambda_i^2 c_i^2 (= {s1:e}) do not level off; u0 may violate the smoothness \
             or boundary hypotheses and the series converges slowly"
        ));
    }

    let n_modes = sys.n_modes();
    let n_steps = spec.n_time_steps;
    let modal = hom.source.modal(&sys)?;
    let (duhamel, source_peak) = if modal.is_zero() {
        (Vec::new(), vec![0.0; n_modes])
    } else {
        let sched = duhamel::Schedule::new(spec.horizon, n_steps);
        let times = sched.times();
        const CHUNK: usize = 64;
        let n_chunks = times.len().div_ceil(CHUNK);
        let chunks = exec.map(n_chunks, &|k| {
            let ts = &times[k * CHUNK..((k + 1) * CHUNK).min(times.len())];
            let mut out = vec![0.0; ts.len() * n_modes];
            for (r, &t) in ts.iter().enumerate() {
                modal.eval(t, &mut out[r * n_modes..(r + 1) * n_modes])?;
            }
            Ok(out)
        })?;
        let values: Vec<f64> = chunks.concat();
        let n_times = times.len();
        let lambdas = sys.lambdas();
        let alpha = spec.alpha;
        let rows = exec.map(n_modes, &|i| {
            let samples: Vec<f64> = (0..n_times).map(|r| values[r * n_modes + i]).collect();
            let pieces = sched.pieces(&samples);
            let w = duhamel::kernel_weights(alpha, lambdas[i], sched.dt(), n_steps)?;
            let mut row = duhamel::convolve(&w, &pieces);
            row.push(
                samples[..n_steps]
                    .iter()
                    .fold(0.0f64, |a, v| a.max(v.abs())),
            );
            Ok(row)
        })?;
        let mut flat = Vec::with_capacity(n_modes * (n_steps + 1));
        let mut peaks = Vec::with_capacity(n_modes);
        for mut r in rows {
            peaks.push(r.pop().unwrap_or(0.0));
            flat.extend_from_slice(&r);
        }
        (flat, peaks)
    };
    Ok(SpectralSolution {
        sys,
        alpha: spec.alpha,
        horizon: spec.horizon,
        n_time_steps: n_steps,
        c,
        duhamel,
        source_peak,
        lift: hom.lift,
        warnings,
    })
}

impl SpectralSolution {
    pub fn eigen(&self) -> &EigenSystem {
        &self.sys
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_time_steps(&self) -> usize {
        self.n_time_steps
    }

    pub fn time_step(&self) -> f64 {
        self.horizon / self.n_time_steps as f64
    }

    /// `c_i = (v₀, X_i)`.
    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn lift(&self) -> &BoundaryLift {
        &self.lift
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// True when neither a source nor boundary data contribute.
    pub fn is_homogeneous(&self) -> bool {
        self.duhamel.is_empty() && self.lift.is_identity()
    }

    /// Tabulated Duhamel integral of mode `i` at the time nodes.
    pub fn duhamel(&self, i: usize) -> Option<&[f64]> {
        let w = self.n_time_steps + 1;
        (!self.duhamel.is_empty()).then(|| &self.duhamel[i * w..(i + 1) * w])
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.horizon;
        if !(t >= -slack && t <= self.horizon + slack) {
            return Err(Error::OutOfDomain { x: f64::NAN, t });
        }
        Ok(t.clamp(0.0, self.horizon))
    }

    /// Modal factors `T_i(t)` of the homogenised problem.
    pub fn time_factors(&self, t: f64) -> Result<Vec<f64>> {
        let t = self.check_time(t)?;
        let ta = powf(t, self.alpha);
        let mut out = Vec::with_capacity(self.c.len());
        for (i, (&ci, &lam)) in self.c.iter().zip(self.sys.lambdas()).enumerate() {
            let mut v = if ci == 0.0 {
                0.0
            } else {
                ci * ml_general(self.alpha, 1.0, -lam * ta)?.value
            };
            if let Some(row) = self.duhamel(i) {
                let s = t / self.time_step();
                let j = (s as usize).min(self.n_time_steps - 1);
                let w = (s - j as f64).clamp(0.0, 1.0);
                v += (1.0 - w) * row[j] + w * row[j + 1];
            }
            out.push(v);
        }
        Ok(out)
    }

    /// `u(x, t) = Σ T_i(t) X_i(x) + lift(x, t)`.
    pub fn eval_solution(&self, x: f64, t: f64) -> Result<f64> {
        let tf = self.time_factors(t)?;
        self.combine(&tf, x, t)
    }

    fn combine(&self, factors: &[f64], x: f64, t: f64) -> Result<f64> {
        let (j, w) = self
            .sys
            .locate(x)
            .map_err(|_| Error::OutOfDomain { x, t })?;
        let mut s = 0.0;
        for (i, f) in factors.iter().enumerate() {
            let m = self.sys.mode(i);
            s += f * ((1.0 - w) * m[j] + w * m[j + 1]);
        }
        Ok(s + self.lift.value(x, t)?)
    }

    /// `∂u/∂t = −Σ c_i λ_i t^{α−1} E_{α,α}(−λ_i t^α) X_i(x)` for homogeneous
    /// problems, `0 < t ≤ T`.
    pub fn time_derivative(&self, x: f64, t: f64) -> Result<f64> {
        if !self.is_homogeneous() {
            return Err(Error::Precondition(
                "the series time derivative is available for homogeneous problems only".into(),
            ));
        }
        if !(t > 0.0) {
            return Err(domain("the time derivative is singular at t = 0"));
        }
        let t = self.check_time(t)?;
        let ta = powf(t, self.alpha);
        let scale = powf(t, self.alpha - 1.0);
        let mut factors = Vec::with_capacity(self.c.len());
        for (&ci, &lam) in self.c.iter().zip(self.sys.lambdas()) {
            let e = if ci == 0.0 {
                0.0
            } else {
                ml_general(self.alpha, self.alpha, -lam * ta)?.value
            };
            factors.push(-ci * lam * scale * e);
        }
        let (j, w) = self
            .sys
            .locate(x)
            .map_err(|_| Error::OutOfDomain { x, t })?;
        Ok(factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let m = self.sys.mode(i);
                f * ((1.0 - w) * m[j] + w * m[j + 1])
            })
            .sum())
    }

    /// A-posteriori estimate of the truncation error in the max norm: power
    /// laws fitted to the last quarter of `|c_i|` and of `max_t |F₁ᵢ|/λ_i`
    /// are summed to infinity and scaled by `max |X_i|`. Infinite when the
    /// fitted decay is not summable.
    pub fn tail_bound(&self) -> f64 {
        let n = self.c.len();
        let xmax = (0..n)
            .map(|i| self.sys.mode(i).iter().fold(0.0f64, |a, v| a.max(v.abs())))
            .fold(0.0f64, f64::max);
        let forced: Vec<f64> = self
            .source_peak
            .iter()
            .zip(self.sys.lambdas())
            .map(|(f, l)| f / l)
            .collect();
        xmax * (power_tail(&self.c) + power_tail(&forced))
    }
}

/// `Σ_{i>n} a_i` for `|a_i| ≈ C i^{−r}` fitted on the last quarter.
fn power_tail(a: &[f64]) -> f64 {
    let n = a.len();
    if n < 8 {
        return 0.0;
    }
    // running envelope from the right smooths out zero coefficients
    let mut env = vec![0.0; n];
    let mut m = 0.0f64;
    for i in (0..n).rev() {
        m = m.max(a[i].abs());
        env[i] = m;
    }
    if env[n / 2] == 0.0 {
        return 0.0;
    }
    let pts: Vec<(f64, f64)> = (3 * n / 4..n)
        .filter(|&i| env[i] > 0.0)
        .map(|i| (ln((i + 1) as f64), ln(env[i])))
        .collect();
    if pts.len() < 2 {
        return env[n - 1] * n as f64;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let r = -sxy / sxx;
    if !(r > 1.0) {
        return f64::INFINITY;
    }
    let last = exp(my + (-r) * (ln(n as f64) - mx));
    last * n as f64 / (r - 1.0)
}

impl Field for SpectralSolution {
    fn value(&self, x: f64, t: f64) -> Result<f64> {
        self.eval_solution(x, t)
    }

    fn sample_grid(&self, xs: &[f64], ts: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(xs.len() * ts.len());
        for &t in ts {
            let tf = self.time_factors(t)?;
            for &x in xs {
                out.push(self.combine(&tf, x, t)?);
            }
        }
        Ok(out)
    }
}

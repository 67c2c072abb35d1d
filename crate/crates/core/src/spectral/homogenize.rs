//! Boundary lift and the transformed source.
//!
//! With `w(x, t) = (x/l)(φ₁ − φ₂) − φ₁`, the function `v = u + w` vanishes at
//! both ends and solves the same equation with source
//!
//! ```text
//! F₁ = F + (x/l) D^α(φ₁ − φ₂) − D^α φ₁ − (φ₁ − φ₂) p′(x)/l + q(x) w
//! ```
//!
//! and initial value `v₀ = u₀ + w(·, 0)`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::ProblemSpec;
use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr, TimeForm, Var};
use crate::fractional::{caputo_l1, SampledFunction, TimeGrid};
use crate::sturm_liouville::{project, EigenSystem, OperatorCoefficients};

/// Refinement of the auxiliary grid used for numerical Caputo derivatives of
/// boundary data, relative to the solver's time grid.
const CAPUTO_REFINEMENT: usize = 8;
/// Most terms produced when splitting `F` into separable products.
const MAX_SEPARABLE_TERMS: usize = 64;
/// Tolerance of the corner compatibility conditions.
pub const COMPATIBILITY_TOL: f64 = 1e-10;

/// The affine-in-`x` boundary interpolant, `u = v + lift`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLift {
    phi1: Expr,
    phi2: Expr,
    length: f64,
}

impl BoundaryLift {
    pub fn new(phi1: Expr, phi2: Expr, length: f64) -> Self {
        Self { phi1, phi2, length }
    }

    pub fn is_identity(&self) -> bool {
        self.phi1.is_zero() && self.phi2.is_zero()
    }

    pub fn phi1(&self, t: f64) -> Result<f64> {
        Ok(self.phi1.eval(0.0, t)?)
    }

    pub fn phi2(&self, t: f64) -> Result<f64> {
        Ok(self.phi2.eval(self.length, t)?)
    }

    /// `φ₁(t) − (x/l)(φ₁(t) − φ₂(t))`.
    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        if self.is_identity() {
            return Ok(0.0);
        }
        let (a, b) = (self.phi1(t)?, self.phi2(t)?);
        Ok(a - x / self.length * (a - b))
    }
}

/// `D^α φ` of a boundary datum, analytic when the expression is catalogued.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCaputo {
    Zero,
    Analytic(TimeForm),
    /// L1 values on a uniform auxiliary grid, linearly interpolated, zero at
    /// `t = 0`.
    Sampled {
        dt: f64,
        values: Vec<f64>,
    },
}

impl BoundaryCaputo {
    fn build(phi: &Expr, alpha: f64, horizon: f64, steps: usize) -> Result<Self> {
        if phi.as_constant().is_some() {
            return Ok(BoundaryCaputo::Zero);
        }
        if let Some(form) = phi.time_form() {
            if form.caputo(alpha, horizon).is_some() {
                return Ok(BoundaryCaputo::Analytic(form));
            }
        }
        let n = steps * CAPUTO_REFINEMENT;
        let grid = TimeGrid::uniform(horizon, n)?;
        let mut samples = Vec::with_capacity(n + 1);
        for &t in grid.nodes() {
            samples.push(phi.eval(0.0, t)?);
        }
        let f = SampledFunction::new(grid, samples)?;
        let d = caputo_l1(&f, alpha)?;
        let mut values = vec![0.0];
        values.extend_from_slice(d.available());
        Ok(BoundaryCaputo::Sampled {
            dt: horizon / n as f64,
            values,
        })
    }

    pub fn eval(&self, alpha: f64, t: f64) -> f64 {
        match self {
            BoundaryCaputo::Zero => 0.0,
            BoundaryCaputo::Analytic(f) => f
                .caputo(alpha, t.max(f64::MIN_POSITIVE))
                .unwrap_or(f64::NAN),
            BoundaryCaputo::Sampled { dt, values } => {
                let s = t / dt;
                let j = (s as usize).min(values.len() - 2);
                let w = (s - j as f64).clamp(0.0, 1.0);
                (1.0 - w) * values[j] + w * values[j + 1]
            }
        }
    }
}

/// Splits `e` into `Σ a_k(x) b_k(t)` when the tree allows it.
pub(crate) fn separate(e: &Expr) -> Option<Vec<(Expr, Expr)>> {
    let one = || Expr::Num(1.0);
    if !e.uses(Var::T) {
        return Some(vec![(e.clone(), one())]);
    }
    if !e.uses(Var::X) {
        return Some(vec![(one(), e.clone())]);
    }
    let terms = match e {
        Expr::Neg(a) => separate(a)?
            .into_iter()
            .map(|(x, t)| (x, Expr::Neg(Box::new(t))))
            .collect(),
        Expr::Binary(op @ (BinOp::Add | BinOp::Sub), a, b) => {
            let mut v = separate(a)?;
            for (x, t) in separate(b)? {
                let t = if *op == BinOp::Sub {
                    Expr::Neg(Box::new(t))
                } else {
                    t
                };
                v.push((x, t));
            }
            v
        }
        Expr::Binary(BinOp::Mul, a, b) => {
            let (l, r) = (separate(a)?, separate(b)?);
            if l.len() * r.len() > MAX_SEPARABLE_TERMS {
                return None;
            }
            let mut v = Vec::with_capacity(l.len() * r.len());
            for (lx, lt) in &l {
                for (rx, rt) in &r {
                    v.push((
                        Expr::Binary(BinOp::Mul, Box::new(lx.clone()), Box::new(rx.clone())),
                        Expr::Binary(BinOp::Mul, Box::new(lt.clone()), Box::new(rt.clone())),
                    ));
                }
            }
            v
        }
        Expr::Binary(BinOp::Div, a, b) => {
            let num = separate(a)?;
            let mut den = separate(b)?;
            if den.len() != 1 {
                return None;
            }
            let (dx, dt) = den.pop()?;
            num.into_iter()
                .map(|(x, t)| {
                    (
                        Expr::Binary(BinOp::Div, Box::new(x), Box::new(dx.clone())),
                        Expr::Binary(BinOp::Div, Box::new(t), Box::new(dt.clone())),
                    )
                })
                .collect()
        }
        _ => return None,
    };
    (terms.len() <= MAX_SEPARABLE_TERMS).then_some(terms)
}

/// `F₁(x, t)` for pointwise use.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedSource {
    alpha: f64,
    source: Expr,
    coeffs: OperatorCoefficients,
    lift: BoundaryLift,
    dphi1: BoundaryCaputo,
    dphi2: BoundaryCaputo,
}

impl TransformedSource {
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let mut v = self.source.eval(x, t)?;
        if self.lift.is_identity() {
            return Ok(v);
        }
        let l = self.coeffs.length();
        let (a, b) = (self.lift.phi1(t)?, self.lift.phi2(t)?);
        let (da, db) = (
            self.dphi1.eval(self.alpha, t),
            self.dphi2.eval(self.alpha, t),
        );
        let xl = x / l;
        v += xl * (da - db) - da;
        v -= (a - b) / l * self.coeffs.dp_at(x)?;
        v += self.coeffs.q_at(x)? * (xl * (a - b) - a);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval(crate::expr::EvalError::NonFinite { x, t }))
        }
    }

    pub fn caputo_phi1(&self) -> &BoundaryCaputo {
        &self.dphi1
    }

    pub fn caputo_phi2(&self) -> &BoundaryCaputo {
        &self.dphi2
    }

    /// Projection machinery onto the modes of `sys`.
    pub fn modal<'a>(&'a self, sys: &'a EigenSystem) -> Result<ModalSource<'a>> {
        let grid = sys.grid();
        let sample = |f: &dyn Fn(f64) -> Result<f64>| -> Result<Vec<f64>> {
            let v: Result<Vec<f64>> = grid.iter().map(|&x| f(x)).collect();
            project(&v?, sys)
        };
        let (separable, generic) = if self.source.is_zero() {
            (Vec::new(), None)
        } else {
            match separate(&self.source) {
                Some(terms) => {
                    let mut out = Vec::with_capacity(terms.len());
                    for (xe, te) in terms {
                        out.push((sample(&|x| Ok(xe.eval(x, 0.0)?))?, te));
                    }
                    (out, None)
                }
                None => (Vec::new(), Some(&self.source)),
            }
        };
        let l = self.coeffs.length();
        let lift_terms = if self.lift.is_identity() {
            None
        } else {
            Some(LiftProjections {
                x_over_l: sample(&|x| Ok(x / l))?,
                one: sample(&|_| Ok(1.0))?,
                dp: sample(&|x| self.coeffs.dp_at(x))?,
                q_x_over_l: sample(&|x| Ok(self.coeffs.q_at(x)? * x / l))?,
                q: sample(&|x| self.coeffs.q_at(x))?,
            })
        };
        Ok(ModalSource {
            src: self,
            sys,
            grid,
            separable,
            generic,
            lift_terms,
        })
    }
}

#[derive(Debug)]
struct LiftProjections {
    x_over_l: Vec<f64>,
    one: Vec<f64>,
    dp: Vec<f64>,
    q_x_over_l: Vec<f64>,
    q: Vec<f64>,
}

/// Evaluates `F₁ᵢ(t) = (F₁(·, t), X_i)` for all modes at once.
#[derive(Debug)]
pub struct ModalSource<'a> {
    src: &'a TransformedSource,
    sys: &'a EigenSystem,
    grid: Vec<f64>,
    separable: Vec<(Vec<f64>, Expr)>,
    generic: Option<&'a Expr>,
    lift_terms: Option<LiftProjections>,
}

impl ModalSource<'_> {
    pub fn is_zero(&self) -> bool {
        self.separable.is_empty() && self.generic.is_none() && self.lift_terms.is_none()
    }

    pub fn eval(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let n = self.sys.n_modes();
        out[..n].iter_mut().for_each(|o| *o = 0.0);
        for (proj, te) in &self.separable {
            let h = te.eval(0.0, t)?;
            out.iter_mut().zip(proj).for_each(|(o, p)| *o += h * p);
        }
        if let Some(f) = self.generic {
            let samples: Result<Vec<f64>> = self.grid.iter().map(|&x| Ok(f.eval(x, t)?)).collect();
            let c = project(&samples?, self.sys)?;
            out.iter_mut().zip(&c).for_each(|(o, p)| *o += p);
        }
        if let Some(lt) = &self.lift_terms {
            let src = self.src;
            let l = src.coeffs.length();
            let (a, b) = (src.lift.phi1(t)?, src.lift.phi2(t)?);
            let (da, db) = (src.dphi1.eval(src.alpha, t), src.dphi2.eval(src.alpha, t));
            for (i, o) in out.iter_mut().enumerate().take(n) {
                *o += da * (lt.x_over_l[i] - lt.one[i])
                    - db * lt.x_over_l[i]
                    - (a - b) / l * lt.dp[i]
                    + (a - b) * lt.q_x_over_l[i]
                    - a * lt.q[i];
            }
        }
        if out[..n].iter().any(|v| !v.is_finite()) {
            return Err(Error::Eval(crate::expr::EvalError::NonFinite {
                x: f64::NAN,
                t,
            }));
        }
        Ok(())
    }
}

/// Result of [`homogenize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Homogenized {
    /// `v₀` on the eigen-grid nodes; zero at both ends.
    pub v0: Vec<f64>,
    pub source: TransformedSource,
    pub lift: BoundaryLift,
}

/// Transforms the problem to homogeneous boundary conditions, sampling `v₀`
/// on `grid`.
pub fn homogenize(spec: &ProblemSpec, grid: &[f64]) -> Result<Homogenized> {
    spec.validate()?;
    let l = spec.coeffs.length();
    let lift = BoundaryLift::new(spec.phi1.clone(), spec.phi2.clone(), l);
    let (a0, b0) = (lift.phi1(0.0)?, lift.phi2(0.0)?);
    let mut v0 = Vec::with_capacity(grid.len());
    for &x in grid {
        v0.push(spec.u0.eval(x, 0.0)? + x / l * (a0 - b0) - a0);
    }
    if let Some(first) = v0.first_mut() {
        *first = 0.0;
    }
    if let Some(last) = v0.last_mut() {
        *last = 0.0;
    }
    let steps = spec.n_time_steps;
    let dphi1 = BoundaryCaputo::build(&spec.phi1, spec.alpha, spec.horizon, steps)?;
    let dphi2 = BoundaryCaputo::build(&spec.phi2, spec.alpha, spec.horizon, steps)?;
    let source = TransformedSource {
        alpha: spec.alpha,
        source: spec.source.clone(),
        coeffs: spec.coeffs.clone(),
        lift: lift.clone(),
        dphi1,
        dphi2,
    };
    Ok(Homogenized { v0, source, lift })
}

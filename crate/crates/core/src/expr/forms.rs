//! Catalogue of time profiles with closed-form Caputo derivatives.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::{BinOp, Expr, Func, Var};
use crate::math;
use crate::special::{gamma, ml_general, rgamma};

/// A function of `t` alone built from catalogued pieces.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeForm {
    /// `c`
    Constant(f64),
    /// `c t^p`, `p > 0`
    Power {
        coef: f64,
        exponent: f64,
    },
    /// `c E_a(-λ t^a)`; `exp(-λ t)` is the case `a = 1`.
    Relaxation {
        coef: f64,
        order: f64,
        rate: f64,
    },
    /// `c t^{b-1} E_{a,b}(-λ t^a)` with `b > 1`.
    MlKernel {
        coef: f64,
        order: f64,
        index: f64,
        rate: f64,
    },
    Sum(Vec<TimeForm>),
}

impl TimeForm {
    fn scale(self, k: f64) -> TimeForm {
        match self {
            TimeForm::Constant(c) => TimeForm::Constant(k * c),
            TimeForm::Power { coef, exponent } => TimeForm::Power {
                coef: k * coef,
                exponent,
            },
            TimeForm::Relaxation { coef, order, rate } => TimeForm::Relaxation {
                coef: k * coef,
                order,
                rate,
            },
            TimeForm::MlKernel {
                coef,
                order,
                index,
                rate,
            } => TimeForm::MlKernel {
                coef: k * coef,
                order,
                index,
                rate,
            },
            TimeForm::Sum(parts) => TimeForm::Sum(parts.into_iter().map(|p| p.scale(k)).collect()),
        }
    }

    /// Caputo derivative of order `alpha` at `t > 0`, when the form admits
    /// one in closed form for this order.
    pub fn caputo(&self, alpha: f64, t: f64) -> Option<f64> {
        match *self {
            TimeForm::Constant(_) => Some(0.0),
            TimeForm::Power { coef, exponent } => Some(
                coef * gamma(1.0 + exponent)
                    * rgamma(1.0 + exponent - alpha)
                    * math::powf(t, exponent - alpha),
            ),
            TimeForm::Relaxation { coef, order, rate } => {
                if order != alpha {
                    return None;
                }
                let z = -rate * math::powf(t, alpha);
                Some(-coef * rate * ml_general(alpha, 1.0, z).ok()?.value)
            }
            TimeForm::MlKernel {
                coef,
                order,
                index,
                rate,
            } => {
                if order != alpha {
                    return None;
                }
                let z = -rate * math::powf(t, alpha);
                let b = index - alpha;
                Some(coef * math::powf(t, b - 1.0) * ml_general(alpha, b, z).ok()?.value)
            }
            TimeForm::Sum(ref parts) => {
                let mut s = 0.0;
                for p in parts {
                    s += p.caputo(alpha, t)?;
                }
                Some(s)
            }
        }
    }
}

/// `c t^p` with any real `p` (including 0).
fn scaled_power(e: &Expr) -> Option<(f64, f64)> {
    if e.uses(Var::X) {
        return None;
    }
    if let Some(c) = e.as_constant() {
        return Some((c, 0.0));
    }
    match e {
        Expr::Var(Var::T) => Some((1.0, 1.0)),
        Expr::Neg(a) => scaled_power(a).map(|(c, p)| (-c, p)),
        Expr::Binary(BinOp::Pow, base, ex) => power_of(base, ex),
        Expr::Call(Func::Pow, args) => power_of(&args[0], &args[1]),
        Expr::Call(Func::Sqrt, args) => {
            let (c, p) = scaled_power(&args[0])?;
            (c >= 0.0).then(|| (math::sqrt(c), p / 2.0))
        }
        Expr::Binary(BinOp::Mul, a, b) => {
            let (c1, p1) = scaled_power(a)?;
            let (c2, p2) = scaled_power(b)?;
            Some((c1 * c2, p1 + p2))
        }
        Expr::Binary(BinOp::Div, a, b) => {
            let (c1, p1) = scaled_power(a)?;
            let (c2, p2) = scaled_power(b)?;
            (c2 != 0.0).then(|| (c1 / c2, p1 - p2))
        }
        _ => None,
    }
}

fn power_of(base: &Expr, ex: &Expr) -> Option<(f64, f64)> {
    let k = ex.as_constant()?;
    let (c, p) = scaled_power(base)?;
    if c < 0.0 && k != math::round(k) {
        return None;
    }
    Some((math::powf(c, k), p * k))
}

/// Matches `ml(a, b, -λ t^a)` and returns `(a, b, λ)`.
fn ml_call(e: &Expr) -> Option<(f64, f64, f64)> {
    let Expr::Call(Func::Ml, args) = e else {
        return None;
    };
    let a = args[0].as_constant()?;
    let b = args[1].as_constant()?;
    if !(a > 0.0 && a <= 1.0 && b > 0.0) {
        return None;
    }
    let (k, p) = scaled_power(&args[2])?;
    if k > 0.0 || (k != 0.0 && p != a) {
        return None;
    }
    Some((a, b, -k))
}

fn product(a: &Expr, b: &Expr) -> Option<TimeForm> {
    if let Some(c) = a.as_constant() {
        return classify(b).map(|f| f.scale(c));
    }
    if let Some(c) = b.as_constant() {
        return classify(a).map(|f| f.scale(c));
    }
    for (pw, other) in [(a, b), (b, a)] {
        if let (Some((c, p)), Some((order, index, rate))) = (scaled_power(pw), ml_call(other)) {
            if index > 1.0 && p == index - 1.0 {
                return Some(TimeForm::MlKernel {
                    coef: c,
                    order,
                    index,
                    rate,
                });
            }
        }
    }
    let (c, p) = scaled_power(&Expr::Binary(
        BinOp::Mul,
        Box::new(a.clone()),
        Box::new(b.clone()),
    ))?;
    power_form(c, p)
}

fn power_form(c: f64, p: f64) -> Option<TimeForm> {
    if p == 0.0 {
        Some(TimeForm::Constant(c))
    } else if p > 0.0 {
        Some(TimeForm::Power {
            coef: c,
            exponent: p,
        })
    } else {
        None
    }
}

pub(super) fn classify(e: &Expr) -> Option<TimeForm> {
    if e.uses(Var::X) {
        return None;
    }
    if let Some(c) = e.as_constant() {
        return Some(TimeForm::Constant(c));
    }
    match e {
        Expr::Neg(a) => classify(a).map(|f| f.scale(-1.0)),
        Expr::Binary(BinOp::Add, a, b) => Some(TimeForm::Sum(vec![classify(a)?, classify(b)?])),
        Expr::Binary(BinOp::Sub, a, b) => {
            Some(TimeForm::Sum(vec![classify(a)?, classify(b)?.scale(-1.0)]))
        }
        Expr::Binary(BinOp::Mul, a, b) => product(a, b),
        Expr::Binary(BinOp::Div, a, b) => {
            if let Some(c) = b.as_constant() {
                if c != 0.0 {
                    return classify(a).map(|f| f.scale(1.0 / c));
                }
            }
            let (c, p) = scaled_power(e)?;
            power_form(c, p)
        }
        Expr::Call(Func::Exp, args) => {
            let (k, p) = scaled_power(&args[0])?;
            (p == 1.0 && k <= 0.0).then_some(TimeForm::Relaxation {
                coef: 1.0,
                order: 1.0,
                rate: -k,
            })
        }
        Expr::Call(Func::Ml, _) => {
            let (order, index, rate) = ml_call(e)?;
            (index == 1.0).then_some(TimeForm::Relaxation {
                coef: 1.0,
                order,
                rate,
            })
        }
        _ => {
            let (c, p) = scaled_power(e)?;
            power_form(c, p)
        }
    }
}

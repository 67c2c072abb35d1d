//! Coefficient expression language.
//!
//! Users supply `p(x)`, `q(x)`, `u₀(x)`, `φ₁(t)`, `φ₂(t)` and `F(x, t)` as
//! small arithmetic expressions:
//!
//! ```text
//! expr    := sum
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?              (right-associative)
//! atom    := number | "x" | "t" | "pi" | "e"
//!          | func "(" expr ("," expr)* ")" | "(" expr ")"
//! func    := sin | cos | exp | log | sqrt | abs | pow | ml
//! ```
//!
//! `ml(a, b, z)` is the Mittag-Leffler function `E_{a,b}(z)`.
//!
//! Exponentiation binds tighter than unary minus, so `-2^2 = -4` and
//! `2^3^2 = 512`.

mod forms;
mod parser;

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

pub use forms::TimeForm;
pub use parser::{parse, parse_bytes, MAX_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Pow,
    Ml,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Pow => "pow",
            Func::Ml => "ml",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            Func::Ml => 3,
            _ => 1,
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "pow" => Func::Pow,
            "ml" => Func::Ml,
            _ => return None,
        })
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    /// Found a token that cannot appear here.
    Unexpected {
        found: String,
        expected: Vec<&'static str>,
    },
    UnknownIdentifier(String),
    WrongArity {
        func: &'static str,
        expected: usize,
        found: usize,
    },
    InvalidNumber(String),
    TooDeep,
    InvalidUtf8,
    Empty,
}

/// Syntax error at a byte offset of the source.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at byte {}: ", self.offset)?;
        match &self.kind {
            ParseErrorKind::Unexpected { found, expected } => {
                write!(f, "found {found}, expected one of: ")?;
                for (i, e) in expected.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    if e.len() == 1 {
                        write!(f, "`{e}`")?;
                    } else {
                        f.write_str(e)?;
                    }
                }
                Ok(())
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}`"),
            ParseErrorKind::WrongArity {
                func,
                expected,
                found,
            } => {
                write!(f, "{func} takes {expected} argument(s), got {found}")
            }
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number literal `{s}`"),
            ParseErrorKind::TooDeep => {
                write!(f, "expression nested deeper than {MAX_DEPTH} levels")
            }
            ParseErrorKind::InvalidUtf8 => f.write_str("input is not valid UTF-8"),
            ParseErrorKind::Empty => f.write_str("empty expression"),
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// Argument outside a function's domain, e.g. `log` of a non-positive value.
    Domain { func: &'static str, arg: f64 },
    /// The expression produced `±∞` or NaN.
    NonFinite { x: f64, t: f64 },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Domain { func, arg } => write!(f, "{func} is undefined at {arg}"),
            EvalError::NonFinite { x, t } => write!(f, "expression is not finite at x={x}, t={t}"),
        }
    }
}

impl core::error::Error for EvalError {}

impl Expr {
    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    /// Evaluate at `(x, t)`. Non-finite results are reported as errors.
    pub fn eval(&self, x: f64, t: f64) -> Result<f64, EvalError> {
        let v = self.eval_raw(x, t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { x, t })
        }
    }

    fn eval_raw(&self, x: f64, t: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::T) => t,
            Expr::Const(Constant::Pi) => core::f64::consts::PI,
            Expr::Const(Constant::E) => core::f64::consts::E,
            Expr::Neg(a) => -a.eval_raw(x, t)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval_raw(x, t)?;
                let b = b.eval_raw(x, t)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b)?,
                }
            }
            Expr::Call(func, args) => {
                let a = args[0].eval_raw(x, t)?;
                match func {
                    Func::Sin => math::sin(a),
                    Func::Cos => math::cos(a),
                    Func::Exp => math::exp(a),
                    Func::Log => {
                        if !(a > 0.0) {
                            return Err(EvalError::Domain {
                                func: "log",
                                arg: a,
                            });
                        }
                        math::ln(a)
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::Domain {
                                func: "sqrt",
                                arg: a,
                            });
                        }
                        math::sqrt(a)
                    }
                    Func::Abs => a.abs(),
                    Func::Pow => pow(a, args[1].eval_raw(x, t)?)?,
                    Func::Ml => {
                        let b = args[1].eval_raw(x, t)?;
                        let z = args[2].eval_raw(x, t)?;
                        match crate::special::ml(crate::special::MlParams::new(a, b, z)) {
                            Ok(r) => r.value,
                            Err(_) => return Err(EvalError::Domain { func: "ml", arg: z }),
                        }
                    }
                }
            }
        })
    }

    /// Whether the variable occurs anywhere in the tree.
    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Neg(a) => a.uses(var),
            Expr::Binary(_, a, b) => a.uses(var) || b.uses(var),
            Expr::Call(_, args) => args.iter().any(|a| a.uses(var)),
        }
    }

    /// Value of a variable-free expression.
    pub fn as_constant(&self) -> Option<f64> {
        if self.uses(Var::X) || self.uses(Var::T) {
            return None;
        }
        self.eval(0.0, 0.0).ok()
    }

    /// True when the expression is the literal `0` (possibly negated).
    pub fn is_zero(&self) -> bool {
        match self {
            Expr::Num(v) => *v == 0.0,
            Expr::Neg(a) => a.is_zero(),
            _ => false,
        }
    }

    /// Recognise catalogued time profiles whose Caputo derivative is known
    /// in closed form.
    pub fn time_form(&self) -> Option<TimeForm> {
        forms::classify(self)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

fn pow(a: f64, b: f64) -> Result<f64, EvalError> {
    if a < 0.0 && b != math::round(b) {
        return Err(EvalError::Domain {
            func: "pow",
            arg: a,
        });
    }
    Ok(math::powf(a, b))
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints with the minimal parentheses that reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    write!(f, "({v})")
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::T) => f.write_str("t"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                // `-(2)` keeps the negation node; `-2` would read as a literal
                write_child(f, a, a.precedence() < 3 || matches!(**a, Expr::Num(_)))
            }
            Expr::Binary(op, a, b) => {
                let p = self.precedence();
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => " * ",
                    BinOp::Div => " / ",
                    BinOp::Pow => "^",
                };
                if *op == BinOp::Pow {
                    write_child(f, a, a.precedence() <= p)?;
                    f.write_str(sym)?;
                    write_child(f, b, b.precedence() < 3)
                } else {
                    write_child(f, a, a.precedence() < p)?;
                    f.write_str(sym)?;
                    write_child(f, b, b.precedence() <= p)
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn ev(s: &str, x: f64, t: f64) -> f64 {
        parse(s).unwrap().eval(x, t).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(ev("x+t", 1.0, 2.0), 3.0);
        assert!((ev("sin(pi*x)", 0.5, 0.0) - 1.0).abs() < 1e-16);
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(ev("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(ev("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(ev("8 / 2 / 2", 0.0, 0.0), 2.0);
        assert_eq!(ev("pow(2, 10)", 0.0, 0.0), 1024.0);
        assert!((ev("ml(1, 1, -1)", 0.0, 0.0) - 0.367_879_441_171_442_33).abs() < 1e-16);
    }

    #[test]
    fn ast_shapes() {
        let e = parse("sin(pi*x)").unwrap();
        let expect = Expr::Call(
            Func::Sin,
            alloc::vec![Expr::Binary(
                BinOp::Mul,
                Box::new(Expr::Const(Constant::Pi)),
                Box::new(Expr::Var(Var::X))
            )],
        );
        assert_eq!(e, expect);
        assert_eq!(
            parse("x*(1-x)*exp(-t)").unwrap().to_string(),
            "x * (1 - x) * exp(-t)"
        );
    }

    #[test]
    fn eval_errors() {
        let e = parse("1/x").unwrap();
        assert!(matches!(e.eval(0.0, 0.0), Err(EvalError::NonFinite { .. })));
        assert!(matches!(
            parse("log(x)").unwrap().eval(-1.0, 0.0),
            Err(EvalError::Domain { func: "log", .. })
        ));
        assert!(matches!(
            parse("sqrt(x)").unwrap().eval(-1.0, 0.0),
            Err(EvalError::Domain { .. })
        ));
        assert!(parse("(-1)^0.5").unwrap().eval(0.0, 0.0).is_err());
        assert!(parse("ml(2, 1, x)").unwrap().eval(0.0, 0.0).is_err());
    }

    #[test]
    fn printing_keeps_structure() {
        for s in [
            "-x^2",
            "(-x)^2",
            "x^-2*3",
            "a",
            "x - (t - 1)",
            "x / (t * 2)",
            "--x",
            "(x^2)^3",
            "x^2^3",
            "-(x + 1)",
        ] {
            if let Ok(e) = parse(s) {
                let printed = e.to_string();
                assert_eq!(parse(&printed).unwrap(), e, "{s} -> {printed}");
            }
        }
    }

    #[test]
    fn constants_and_usage() {
        let e = parse("2*pi + e").unwrap();
        assert!(
            (e.as_constant().unwrap() - (2.0 * core::f64::consts::PI + core::f64::consts::E)).abs()
                < 1e-15
        );
        assert!(parse("x*t").unwrap().uses(Var::T));
        assert!(!parse("x").unwrap().uses(Var::T));
        assert!(parse("0").unwrap().is_zero());
        assert!(parse("-0").unwrap().is_zero());
        assert!(!parse("0*x").unwrap().is_zero());
    }
}

use alloc::string::String;
use core::fmt;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong inside the solver library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    Domain(String),
    /// The result would not fit in an `f64`.
    Overflow(String),
    /// Time grid is not usable for a discrete operator.
    Grid(String),
    /// More eigenmodes requested than the grid can resolve.
    Resolution {
        n_modes: usize,
        grid_size: usize,
    },
    /// `p > 0` or `q ≥ 0` violated on the discretization grid.
    Coefficient {
        name: &'static str,
        x: f64,
        value: f64,
    },
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    /// Initial and boundary data disagree at a corner of the domain.
    Compatibility {
        side: &'static str,
        initial: f64,
        boundary: f64,
    },
    /// Source rate coincides with an eigenvalue; the resonant formula applies.
    Resonance {
        lambda: f64,
        lambda_k: f64,
    },
    /// A check was asked to run on inputs that violate its hypotheses.
    Precondition(String),
    /// Evaluation point outside `[0, l] × [0, T]`.
    OutOfDomain {
        x: f64,
        t: f64,
    },
    Parse(ParseError),
    Eval(EvalError),
    /// A numerical procedure did not reach its tolerance.
    NoConvergence(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Overflow(msg) => write!(f, "overflow: {msg}"),
            Error::Grid(msg) => write!(f, "grid error: {msg}"),
            Error::Resolution { n_modes, grid_size } => write!(
                f,
                "resolution error: {n_modes} modes need at least {} grid nodes, got {grid_size}",
                4 * n_modes
            ),
            Error::Coefficient { name, x, value } => {
                let rule = if *name == "p" { "p(x) > 0" } else { "q(x) >= 0" };
                write!(f, "coefficient {name} violates {rule}: {name}({x}) = {value}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected} samples, found {found}")
            }
            Error::Compatibility { side, initial, boundary } => write!(
                f,
                "incompatible data at {side} endpoint: u0 = {initial}, boundary value at t=0 is {boundary}"
            ),
            Error::Resonance { lambda, lambda_k } => write!(
                f,
                "resonant forcing: lambda = {lambda} coincides with lambda_k = {lambda_k}"
            ),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::OutOfDomain { x, t } => write!(f, "point (x={x}, t={t}) is outside the domain"),
            Error::Parse(e) => write!(f, "{e}"),
            Error::Eval(e) => write!(f, "{e}"),
            Error::NoConvergence(msg) => write!(f, "no convergence: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        Error::Eval(e)
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

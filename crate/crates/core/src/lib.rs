//! Spectral (eigenfunction-series) solver for initial-boundary-value
//! problems of the one-dimensional time-fractional diffusion equation
//!
//! ```text
//! D_t^α u = (p(x) u_x)_x − q(x) u + F(x, t),   0 < x < l,  0 < t ≤ T,
//! u(x, 0) = u₀(x),   u(0, t) = φ₁(t),   u(l, t) = φ₂(t),
//! ```
//!
//! where `D_t^α`, `0 < α ≤ 1`, is the Caputo derivative.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command-line
//! front-end and threading live in the companion `fracspec` crate.
//!
//! Module map:
//!
//! * [`special`]: Gamma and Mittag-Leffler functions.
//! * [`fractional`]: discrete Caputo derivative (L1 scheme) and
//!   Riemann-Liouville integral.
//! * [`sturm_liouville`]: Dirichlet eigenpairs of `L u = −(p u′)′ + q u`.
//! * [`expr`]: the coefficient expression language.
//! * [`spectral`]: boundary lift, modal projection, Duhamel convolution and
//!   solution evaluation.
//! * [`verify`]: executable checks (maximum principle, stability estimate,
//!   residual, long-time exponents, refinement agreement).
#![no_std]
#![warn(missing_debug_implementations)]
// `!(a > b)` style tests deliberately reject NaN alongside out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod expr;
pub mod fractional;
mod math;
pub mod quadrature;
pub mod special;
pub mod spectral;
pub mod sturm_liouville;
pub mod verify;

pub use error::{Error, Result};
pub use expr::Expr;
pub use special::{ml, Method, MlParams, MlResult};
pub use spectral::{ProblemSpec, SpectralSolution};
pub use sturm_liouville::{EigenSystem, OperatorCoefficients};
pub use verify::CheckReport;

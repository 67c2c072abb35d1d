//! Special functions: Gamma and the two-parameter Mittag-Leffler function.

mod gamma;
mod mittag_leffler;

pub use gamma::{cos_pi, gamma, lgamma, rgamma, sin_pi, GAMMA_MAX_ARG};
pub use mittag_leffler::{
    asymptotic_threshold, ml, ml_asymptotic, ml_bound_check, ml_derivative, ml_general, ml_value,
    AsymptoticExpansion, Method, MlParams, MlResult, ASYMPTOTIC_MAX_TERMS, TAYLOR_MAX_TERMS,
    TAYLOR_RADIUS,
};

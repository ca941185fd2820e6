//! Special functions and quadrature shared by every analytic formula.

mod bessel;
mod logint;
mod quad;
mod series;

pub use bessel::{bessel_i, bessel_i_scaled, MAX_ABS_ARG, MAX_ORDER};
pub(crate) use bessel::bessel_i_scaled_unbounded;
pub use logint::{
    gaussian_q, ln_log_kernel, log2_moment_integral, log2_moment_normalized, log_moment_integral,
    log_moment_normalized,
};
pub use quad::{
    integrate, integrate_to_infinity, NeumaierSum, QuadResult, QuadratureRule, RuleKind, Tolerance,
};
pub use series::{
    binomial, digamma_int, factorial, harmonic, hyper_4f3, laguerre, laguerre_table, ln_binomial, ln_factorial,
    rising_ratio, upper_gamma_int, upper_gamma_q_int, zeta2, EULER_GAMMA, HYPER_MAX_TERMS,
    HYPER_REL_TOL,
};

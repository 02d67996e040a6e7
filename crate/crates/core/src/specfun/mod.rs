//! Special functions and quadrature rules used by the coverage expressions.

mod beta;
mod gamma;
mod hyper;
mod normal;
mod quadrature;

pub use beta::inc_beta_gen;
pub use gamma::{
    gamma, ln_gamma, lower_inc_gamma, lower_inc_gamma_scaled, pochhammer, regularized_lower_gamma,
    upper_inc_gamma,
};
pub use hyper::{gauss_2f1_neg, gauss_2f1_neg_reduced};
pub use normal::{erfc, inverse_q, q_function};
pub use quadrature::{chebyshev_rule, Integrator, Quadrature, QuadratureRule};

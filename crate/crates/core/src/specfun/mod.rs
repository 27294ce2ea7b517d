//! Special functions and integration primitives.

pub mod chebyshev;
pub mod combinatorics;
pub mod gamma;
pub mod quadrature;

pub use chebyshev::{chebyshev_table, ChebyshevTable};
pub use combinatorics::{log_multinomial, weak_composition_count, WeakCompositions};
pub use gamma::{
    binomial, gamma, gamma_lower, gamma_p, gamma_q, gamma_upper, ln_factorial, ln_gamma, ln_gamma_lower,
    ln_gamma_upper, lower_gamma_scaled,
};
pub use quadrature::{
    integrate_finite, integrate_finite_with, integrate_semi_infinite, integrate_semi_infinite_with, QuadOptions,
};

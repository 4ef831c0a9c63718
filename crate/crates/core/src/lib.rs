//! Shifted and higher-order Grünwald approximations of fractional derivatives,
//! their Fourier symbols and multiplier norms, and method-of-lines solvers for
//! fractional-in-space evolution problems.

pub mod cli;
pub mod convergence;
pub mod error;
pub mod grunwald;
pub mod norms;
pub mod oracles;
pub mod pde;
pub mod quadrature;
pub mod series;
pub mod symbols;

pub use error::{Error, Result};
pub use grunwald::{
    apply_scheme, apply_shifted_grunwald, grunwald_weights, second_order_scheme,
    solve_scheme_coefficients, third_order_scheme, Domain, FracOrder, GridFunction, Scheme,
    SchemeTerm, Truncation,
};
pub use symbols::{
    certify_stability, combined_symbol, omega_eval, omega_taylor, optimal_shift, psi_eval,
    psi_real_closed_form, taylor_cancellation_check, OmegaSeries, StabilityReport, SymbolFn,
};

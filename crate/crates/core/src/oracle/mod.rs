//! Independent checks of the closed forms: Monte Carlo over a finite population of
//! agents, and Gauss–Hermite integration over the prior.

mod prior;
mod simulation;

pub use prior::{
    cmc_closed_form, cmc_prior_integral, mgf_noncentral_chi2, mgf_quadrature, uniqueness_lhs_appendix_d,
    uniqueness_lhs_quadrature, uniqueness_lhs_supremum,
};
pub use simulation::{simulate_attack, simulate_success_prob, BinomialEstimate, SimulationResult, MIN_AGENTS};

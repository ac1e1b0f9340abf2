//! Estimators and exact finite-state oracles.

mod ess;
mod oracle;
mod stats;

pub use ess::{ess_batch_means, ess_batch_means_multi, icbrt, EssReport};
pub use oracle::{
    check_detailed_balance, check_stationary, lump, product_matrix, transition_matrix, Check, KeySpec, StateSpace,
    TransitionMatrix, MAX_STATES,
};
pub use stats::{
    acceptance_rate, chi_square_gof, kolmogorov_q, ks_test, mean_and_mcse, moment_estimates, ChiSquare, KsResult,
};

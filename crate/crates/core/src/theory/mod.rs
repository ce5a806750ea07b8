//! Bias functionals, the constants they are built from, and tuning-rate
//! diagnostics.

mod bias;
mod chi;
pub mod quadrature;
mod rates;

pub use bias::{
    bias_cf_symmetric, bias_functionals, cf_to_tail_scale, BiasValue, StableTailParams,
};
pub use chi::{chi, chi_prime, chi_prime_with, chi_relation, chi_with, ChiRelation, QuadOptions};
pub use rates::{rate_diagnostics, RateReport, RateWarning};

//! Samplers for the test models: symmetric stable increments, CIR variance,
//! the stochastic-volatility-plus-jumps model and constant-coefficient Lévy
//! models. Every sampler returns the true integrated variance alongside.

mod model;
mod seed;
mod stable;

pub use model::{
    random_seed, simulate_cir, simulate_levy_const, simulate_sv_path, simulate_sv_path_with,
    SimOutput, SimScenario,
};
pub use seed::{derive_seed, stream_rng, Stream};
pub use stable::{sample_stable_increments, SymmetricStable};

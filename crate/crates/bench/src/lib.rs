//! Shared fixtures for the benchmarks.

use charvol::simulation::simulate_sv_path;
use charvol::{SampledPath, SimScenario};

/// Simulated days at `per_day` observations with moderately active jumps.
pub fn fixture_days(per_day: f64, days: usize, seed: u64) -> Vec<SampledPath> {
    let sc = SimScenario::study(1.0 / per_day, days, 1.5, 1.0, seed);
    simulate_sv_path(&sc)
        .and_then(|o| o.path.split_periods(1.0))
        .expect("fixture scenario is valid")
}

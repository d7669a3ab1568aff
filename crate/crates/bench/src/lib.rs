//! Shared fixtures for the benchmarks.

use pdsvrp_core::gen::{random_min_cost, random_min_time, GenParams};
use pdsvrp_core::Instance;

/// Seeded min-time and min-cost instances with `n` customers, 2 trucks and
/// 2 drones.
pub fn pair(n: usize, seed: u64) -> (Instance, Instance) {
    let p = GenParams::new(n, 2, 2);
    (random_min_time(&p, seed), random_min_cost(&p, seed))
}

//! Fixed inputs for the benchmarks.

use asymcc_core::analysis::euclidean_metric;
use asymcc_core::instance::{gen_random, Instance, RandomSpec};
use asymcc_core::partition::{Metric, Mode, PartitionParams};

/// Planted three-cluster instance with 10% sign noise.
pub fn planted(n: usize, seed: u64) -> Instance {
    let spec = RandomSpec {
        n,
        alpha: 0.25,
        planted_k: 3,
        flip_prob: 0.1,
        seed,
    };
    gen_random(spec).expect("valid spec").0
}

/// Random points in the unit square, distances truncated at 1.
pub fn metric(n: usize, seed: u64) -> Metric {
    euclidean_metric(n, seed).expect("valid metric")
}

/// `beta = 0.05`, `q = 2`, `R = 1/3`, practical mode.
pub fn practical_params() -> PartitionParams {
    PartitionParams::from_beta(0.05, 1.0 / 3.0, 2.0, Mode::Practical).expect("admissible")
}

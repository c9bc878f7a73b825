//! Shared inputs for the benchmarks.

use djsp_core::events::random_instance;
use djsp_core::Instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded random instance with durations in `[1, 10]`.
pub fn seeded_instance(seed: u64, jobs: usize, machines: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(&mut rng, jobs, machines, (1, 10))
}

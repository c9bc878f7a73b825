#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use djsp_core::events::random_instance;
use djsp_core::{Instance, JobLabel, Operation, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// FT-style instance with `n` in `1..=max_n` and `m` in `1..=max_m`.
pub fn small_instance(seed: u64, max_n: usize, max_m: usize) -> Instance {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let m = r.gen_range(1..=max_m);
    random_instance(&mut r, n, m, (1, 9))
}

/// Jobs of uneven length whose machines may repeat within a job.
pub fn ragged_instance(seed: u64, max_n: usize, max_m: usize, max_ops: usize) -> Instance {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let m = r.gen_range(1..=max_m);
    let jobs: BTreeMap<JobLabel, Vec<Operation>> = (1..=n as JobLabel)
        .map(|j| {
            let k = r.gen_range(1..=max_ops);
            (
                j,
                (0..k)
                    .map(|_| Operation::new(r.gen_range(0..m), r.gen_range(1..=9)))
                    .collect(),
            )
        })
        .collect();
    Instance::new(m, jobs, BTreeMap::new()).unwrap()
}

/// Copy of `inst` with one random window on a random machine.
pub fn with_random_window(inst: &Instance, seed: u64) -> Instance {
    let mut r = rng(seed ^ 0x5eed);
    let horizon: i64 = inst.operations().map(|(_, op)| op.duration).sum();
    let machine = r.gen_range(0..inst.machine_count());
    let start = r.gen_range(0..=horizon.max(1));
    let len = r.gen_range(1..=5);
    let mut maintenance = BTreeMap::new();
    maintenance.insert(machine, vec![Window::new(start, start + len).unwrap()]);
    Instance::new(inst.machine_count(), inst.jobs().clone(), maintenance).unwrap()
}

pub fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

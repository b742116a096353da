//! Seeded workloads shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfsim_core::{GroupSpec, GroupWord, Symbol};

pub fn grigorchuk() -> GroupSpec {
    GroupSpec::builtin("grigorchuk").expect("built-in")
}

/// `count` reduced words of exactly `len` symbols before normalization.
pub fn random_words(spec: &GroupSpec, count: usize, len: usize, seed: u64) -> Vec<GroupWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = spec.generators().len();
    (0..count)
        .map(|_| {
            spec.normalize_symbols(
                (0..len).map(|_| Symbol::new(rng.gen_range(0..gens), rng.gen_bool(0.5))),
            )
        })
        .collect()
}

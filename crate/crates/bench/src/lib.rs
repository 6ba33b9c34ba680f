//! Seeded inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fermroute::random::scrambled_tree;
use fermroute::{Permutation, TernaryTree};

pub fn permutation(n: usize, seed: u64) -> Permutation {
    Permutation::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Jordan-Wigner scrambled by `4n` tree-compatible gates.
pub fn tree(n: usize, seed: u64) -> TernaryTree {
    scrambled_tree(n, 4 * n, &mut ChaCha8Rng::seed_from_u64(seed))
}

//! Seeded random streams for resampling loops.
//!
//! Every iteration gets its own ChaCha8 stream derived from `(seed, stream)`,
//! so results do not depend on the order iterations run in.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `k` distinct indices from `0..n`, ascending.
pub fn subsample(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    assert!(k <= n, "cannot draw {k} of {n} without replacement");
    let mut picked = index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    picked
}

//! Reproducible per-path random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random source owned by one worker or path.
pub type RandomStream = ChaCha8Rng;

/// Stream `index` of the family keyed by `seed`. Streams are independent
/// of the order in which they are created, so parallel ensembles are
/// reproducible.
pub fn stream(seed: u64, index: u64) -> RandomStream {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

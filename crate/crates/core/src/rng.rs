//! Counter-based random substreams.
//!
//! Every consumer index (a sample, a generated unit) gets its own ChaCha
//! stream keyed by the run seed and selected by the index, so draws do not
//! depend on evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The independent stream number `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A standard normal vector of length `dim` from substream `index`.
pub fn normal_vector(seed: u64, index: u64, dim: usize) -> Vec<f64> {
    let mut rng = substream(seed, index);
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

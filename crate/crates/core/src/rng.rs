//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 generator keyed
//! by a 64-bit master seed (expanded with `SeedableRng::seed_from_u64`) and a
//! 64-bit stream index set with `set_stream`. Streams with different indices
//! are independent, and the output of a given `(seed, stream)` pair is the same
//! on every platform and at every thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream used for drawing Haar-random unitaries.
pub const UNITARY_STREAM: u64 = 0;
/// Stream used when sampling from an exact output distribution.
pub const SAMPLE_STREAM: u64 = 1;
/// Monte Carlo trial `i` uses stream `TRIAL_STREAM_BASE + i`.
pub const TRIAL_STREAM_BASE: u64 = 1 << 32;

pub fn stream(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

pub fn trial_stream(master_seed: u64, trial: u64) -> StreamRng {
    stream(master_seed, TRIAL_STREAM_BASE.wrapping_add(trial))
}

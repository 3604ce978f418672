//! Seeded, splittable randomness.
//!
//! Every random decision in the crate flows from a single 64-bit seed
//! through named ChaCha substreams, so toggling one pipeline step never
//! perturbs the draws of another and per-trial verification seeds are
//! independent of worker scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids of the augmentation pipeline steps.
pub const STREAM_NODE_SAMPLING: u64 = 0;
pub const STREAM_EDGE_DELETION: u64 = 1;
pub const STREAM_EDGE_ADDITION: u64 = 2;
pub const STREAM_FEATURE_MASKING: u64 = 3;

/// An independent generator for (`seed`, `stream`).
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-trial generator for randomized verification: property and trial
/// index are packed into the stream id.
pub fn trial_stream(seed: u64, property: u64, trial: u64) -> ChaCha8Rng {
    substream(seed, (property << 32) | (trial & 0xffff_ffff))
}

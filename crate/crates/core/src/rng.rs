//! Seed derivation.
//!
//! Every consumer of randomness gets its own ChaCha stream derived from the
//! master seed, a round index and a stream tag, so changing how much
//! randomness one component draws never shifts another component's stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Solver = 1,
    MeanField = 2,
    Strategy = 3,
    Oracle = 4,
    Dataset = 5,
    Init = 6,
    Reveal = 7,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Mixes a seed with any number of extra words into a new 64-bit seed.
pub fn derive_seed(seed: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(seed), |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, round: usize, stream: Stream) -> Rng {
    seeded(derive_seed(seed, &[round as u64, stream as u64]))
}

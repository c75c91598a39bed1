//! Seed derivation.
//!
//! Every consumer of randomness gets its own ChaCha stream keyed by
//! `(master seed, purpose tag, index)`, so results do not depend on the order
//! in which trials are scheduled or on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose tags separating independent streams derived from one master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    ClauseCount = 1,
    ClauseVars = 2,
    ClauseSigns = 3,
    Trial = 4,
    SharedBits = 5,
    Instance = 6,
    Solution = 7,
    Decimation = 8,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes `(seed, purpose, index)` into a 64-bit sub-seed.
pub fn derive_seed(seed: u64, purpose: Purpose, index: u64) -> u64 {
    let h = splitmix64(seed);
    let h = splitmix64(h ^ (purpose as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(h ^ index)
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, purpose, index))
}

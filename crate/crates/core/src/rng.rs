//! Seeded randomness and seed derivation.
//!
//! Every random draw in the crate goes through [`seeded`], a ChaCha8 stream
//! keyed by a `u64`. Sub-seeds for individual runs are obtained with
//! [`derive_seed`] so that a run's randomness depends only on its identity and
//! never on the order in which runs are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// SplitMix64 output function.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a sub-seed from `(master, run_id, label)`.
///
/// The hash is FNV-1a 64 over `master` (little-endian), `run_id`
/// (little-endian), a `0xff` separator and the UTF-8 bytes of `label`,
/// finished with the SplitMix64 output mix. The construction is part of the
/// reproducibility contract and must not change.
pub fn derive_seed(master: u64, run_id: u64, label: &str) -> u64 {
    let mut h = fnv1a(FNV_OFFSET, &master.to_le_bytes());
    h = fnv1a(h, &run_id.to_le_bytes());
    h = fnv1a(h, &[0xff]);
    h = fnv1a(h, label.as_bytes());
    mix64(h)
}

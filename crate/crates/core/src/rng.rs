//! Deterministic per-item random streams.
//!
//! Every randomized dataset operation derives one ChaCha stream per work item
//! from the master seed, so results do not depend on iteration order or on how
//! rayon schedules the items.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent purposes that draw from the same master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Domain {
    Equalize = 1,
    Augment = 2,
}

const FIELD_BITS: u32 = 28;
const FIELD_MASK: u64 = (1 << FIELD_BITS) - 1;

/// Stream for work item `(major, minor)` of `domain` under `seed`.
///
/// `major` and `minor` are truncated to 28 bits each.
pub fn item_rng(seed: u64, domain: Domain, major: usize, minor: usize) -> ChaCha8Rng {
    let stream = ((domain as u64) << (2 * FIELD_BITS))
        | ((major as u64 & FIELD_MASK) << FIELD_BITS)
        | (minor as u64 & FIELD_MASK);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

//! Keyed counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream selected
//! by `(seed, domain, index)`. ChaCha is a counter-mode generator, so the
//! `k`-th word of a stream can be reached directly with
//! [`ChaCha8Rng::set_word_pos`]; splitting work across threads never changes
//! the values drawn.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INDEX_BITS: u32 = 48;
const INDEX_MASK: u64 = (1 << INDEX_BITS) - 1;

/// Families of streams. Two domains never share a stream for the same seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum Domain {
    Graph = 1,
    Labels = 2,
    Retention = 3,
    Walk = 4,
    Wilson = 5,
    Search = 6,
    Bootstrap = 7,
    Sampling = 8,
}

/// Stream `index` of `domain` under `seed`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    debug_assert!(index <= INDEX_MASK);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << INDEX_BITS) | (index & INDEX_MASK));
    rng
}

/// Positions `rng` so that the next `next_u64` returns the word at `position`.
pub fn seek_u64(rng: &mut ChaCha8Rng, position: u64) {
    rng.set_word_pos(2 * position as u128);
}

/// Maps 64 random bits to a uniform value in `[0, 1)` with 53 bits of precision.
#[inline]
pub fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn next_unit(rng: &mut impl RngCore) -> f64 {
    unit(rng.next_u64())
}

/// Derives a child seed; used to give each replica its own key.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed
        ^ index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential() {
        let mut seq = stream(7, Domain::Labels, 3);
        let words: Vec<u64> = (0..100).map(|_| seq.next_u64()).collect();
        let mut ra = stream(7, Domain::Labels, 3);
        for &k in &[0u64, 17, 99, 42] {
            seek_u64(&mut ra, k);
            assert_eq!(ra.next_u64(), words[k as usize]);
        }
    }

    #[test]
    fn domains_and_indices_are_distinct() {
        let a = stream(1, Domain::Labels, 0).next_u64();
        let b = stream(1, Domain::Graph, 0).next_u64();
        let c = stream(1, Domain::Labels, 1).next_u64();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unit_range() {
        assert_eq!(unit(0), 0.0);
        assert!(unit(u64::MAX) < 1.0);
    }
}

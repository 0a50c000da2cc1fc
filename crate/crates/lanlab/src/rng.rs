//! Counter-based derivation of independent random streams.
//!
//! Every source of randomness in the toolkit is a [`ChaCha8Rng`] keyed by
//! a 256-bit value expanded from `(master_seed, index...)` with SplitMix64.
//! Distinct key material selects distinct ChaCha streams, so streams
//! derived from distinct indices share no subsequences by construction,
//! and the stream contents do not depend on which thread asks first.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer (Steele, Lea & Flood). Full-avalanche 64-bit mix.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn expand_key(words: &[u64]) -> [u8; 32] {
    // Absorb the inputs through the mixer (order-sensitive fold), then
    // squeeze four key words.
    let mut acc = 0x243f6a8885a308d3u64; // pi fractional bits, fixed offset
    for &w in words {
        let mut t = acc.wrapping_add(w).wrapping_mul(0x9e3779b97f4a7c15);
        acc = splitmix64(&mut t);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut acc).to_le_bytes());
    }
    key
}

/// Stream for replication `index` under `master_seed`.
pub fn derive_stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(expand_key(&[master_seed, index]))
}

/// Stream keyed by a master seed plus an arbitrary tag path, for
/// sub-streams that must be a pure function of "what they are for"
/// rather than of call order (endpoint tapes, noise tables, ...).
pub fn derive_tagged_stream(master_seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut words = Vec::with_capacity(tags.len() + 1);
    words.push(master_seed);
    words.extend_from_slice(tags);
    ChaCha8Rng::from_seed(expand_key(&words))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;
    use std::collections::HashSet;

    #[test]
    fn same_seed_and_index_reproduce() {
        let mut a = derive_stream(42, 7);
        let mut b = derive_stream(42, 7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_indices_differ() {
        let mut a = derive_stream(42, 0);
        let mut b = derive_stream(42, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn master_seed_avalanche_no_collisions() {
        // Changing the master seed changes every stream's first output;
        // over 10^3 seeds the first outputs of stream 0 never collide.
        let mut seen = HashSet::new();
        for seed in 0..1000u64 {
            let mut s = derive_stream(seed, 0);
            assert!(seen.insert(s.next_u64()), "collision at seed {seed}");
        }
    }

    #[test]
    fn tagged_streams_distinguish_paths() {
        let mut a = derive_tagged_stream(1, &[2, 3]);
        let mut b = derive_tagged_stream(1, &[3, 2]);
        assert_ne!(a.next_u64(), b.next_u64());
    }
}

//! Counter-based random streams for reproducible parallel experiments.
//!
//! A stream is a pure function of `(master_seed, experiment label, index)`:
//! the master seed and label are hashed into a 256-bit ChaCha key, and the
//! index selects one of ChaCha's 2⁶⁴ independent streams. Replicates can
//! therefore run on any number of workers in any order and still see exactly
//! the same randomness.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Derive the RNG for one replicate. `label` separates experiment kinds so
/// that, e.g., a CLT run and an LIL run with the same master seed do not
/// share randomness; `index` is the replicate/stream counter.
pub fn derive_stream(master_seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut state = master_seed ^ fnv1a(label.as_bytes());
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

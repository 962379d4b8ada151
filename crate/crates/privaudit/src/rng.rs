//! Deterministic named RNG sub-streams.
//!
//! Every randomized component draws from its own stream, derived from the
//! master seed plus a label (and optionally an index such as a shadow-run or
//! trial number). Work units therefore produce identical results regardless
//! of execution order or thread count: parallelism can reorder *when* a
//! stream is consumed but never *what* it yields.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// FNV-1a 64-bit hash of a label.
fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// SplitMix64 finalizer; decorrelates nearby seed values.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive a child seed from `seed` and a stream label.
pub fn child_seed(seed: u64, label: &str) -> u64 {
    splitmix(seed ^ fnv1a(label))
}

/// Derive a child seed from `seed`, a stream label and an index
/// (shadow-run number, trial number, generation, ...).
pub fn child_seed_idx(seed: u64, label: &str, idx: u64) -> u64 {
    splitmix(child_seed(seed, label) ^ splitmix(idx.wrapping_add(1)))
}

/// Named RNG stream.
pub fn stream(seed: u64, label: &str) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(child_seed(seed, label))
}

/// Named, indexed RNG stream.
pub fn stream_idx(seed: u64, label: &str, idx: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(child_seed_idx(seed, label, idx))
}

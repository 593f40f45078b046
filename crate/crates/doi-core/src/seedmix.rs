//! Counter-based seed derivation.
//!
//! Every randomized component takes one user-facing seed and derives
//! per-item seeds with a SplitMix64 finalizer over `(seed, index)`. Item
//! seeds therefore depend only on their index, never on evaluation order,
//! which is what makes parallel sweeps reproducible.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and a stream index.
pub fn derive(base: u64, stream: u64) -> u64 {
    mix(base ^ mix(stream.wrapping_add(0x6A09_E667_F3BC_C909)))
}

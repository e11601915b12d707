//! Counter-based deterministic randomness.
//!
//! All stochastic choices in the crate — exploration, percept draws,
//! episode resets — are pure functions of `(seed, counter, context)`.
//! Nothing here carries mutable state, so any component can be rebuilt
//! from its seed and replayed bit-for-bit, and shadow copies of an agent
//! can reproduce the original's choices exactly.

use crate::types::ObservationId;

/// Finalizing 64-bit mixer (the SplitMix64 output permutation).
///
/// Small input differences avalanche across all output bits, which is what
/// lets sequential counters stand in for independent draws.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic uniform draw in `[0, 1)` keyed by seed, counter and
/// observation.
///
/// The three inputs are folded together through [`mix64`] and the top 53
/// bits of the result become the mantissa of an `f64`, so every distinct
/// `(seed, counter, obs)` triple yields its own reproducible value.
pub fn derive_random(seed: u64, counter: u64, obs: ObservationId) -> f64 {
    let mut z = mix64(seed ^ mix64(counter).wrapping_add(0x9e37_79b9_7f4a_7c15));
    z = mix64(z ^ mix64(obs.0 as u64 ^ 0xd1b5_4a32_d192_ed03));
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

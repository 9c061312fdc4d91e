//! Deterministic random numbers for instance generation.
//!
//! Randomized benchmark instances must be reproducible from a seed in any
//! language, so instead of depending on an external RNG this module fixes a
//! SplitMix64 recurrence with explicit constants:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15                     (wrapping)
//! z  = state
//! z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9       (wrapping)
//! z  = (z ^ (z >> 27)) * 0x94D049BB133111EB       (wrapping)
//! out = z ^ (z >> 31)
//! ```
//!
//! Uniform reals in `[0, 1)` take the top 53 bits: `(out >> 11) * 2^-53`.

use crate::scalar::Scalar;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_A: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_B: u64 = 0x94D0_49BB_1331_11EB;

/// 2^-53, exactly representable.
const TWO_NEG_53: f64 = 1.0 / 9_007_199_254_740_992.0;

/// SplitMix64 generator with a 64-bit state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_A);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_B);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_NEG_53
    }

    /// Uniform in `[0, 1)`, converted into the requested scalar type.
    pub fn next_unit<T: Scalar>(&mut self) -> T {
        T::of(self.next_f64())
    }
}

//! Counter-based random numbers.
//!
//! Every draw is a pure function of `(seed, stream path, a, b)`: the key is
//! derived by hashing the seed and the stream indices, and a draw at counter
//! `(a, b)` hashes the counter into the key. The hash is the SplitMix64
//! finalizer (Steele, Lea and Flood) with the constants below, so outputs are
//! identical across platforms, thread counts and evaluation orders.

/// Weyl increment of SplitMix64 (the 64-bit golden ratio).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// First multiplier of the SplitMix64 finalizer.
pub const MIX_MUL_1: u64 = 0xBF58_476D_1CE4_E5B9;
/// Second multiplier of the SplitMix64 finalizer.
pub const MIX_MUL_2: u64 = 0x94D0_49BB_1331_11EB;
/// Odd constant separating the second counter coordinate from the first.
pub const COUNTER_MUL: u64 = 0xD6E8_FEB8_6659_FD93;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_MUL_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_MUL_2);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { key: mix64(seed.wrapping_add(GOLDEN_GAMMA)) }
    }

    /// An independent child stream.
    pub fn stream(&self, index: u64) -> Self {
        CounterRng { key: mix64(self.key ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))) }
    }

    pub fn word(&self, a: u64, b: u64) -> u64 {
        let h = mix64(self.key.wrapping_add(a.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)));
        mix64(h ^ b.wrapping_add(1).wrapping_mul(COUNTER_MUL))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn unit(&self, a: u64, b: u64) -> f64 {
        (self.word(a, b) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `0..n` (`n > 0`) by widening multiplication.
    pub fn below(&self, a: u64, b: u64, n: u64) -> u64 {
        ((self.word(a, b) as u128 * n as u128) >> 64) as u64
    }
}

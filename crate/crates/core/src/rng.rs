//! Portable seeded random numbers.
//!
//! Starting points and problem matrices must be reproducible bit-for-bit in
//! other languages, so this module pins the exact recurrences instead of
//! relying on a library generator whose stream may change between releases.
//!
//! * Integer stream: SplitMix64. The state advances by `0x9E3779B97F4A7C15`
//!   (wrapping) and each output is the state passed through
//!   `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//!   z *= 0x94D049BB133111EB; z ^= z >> 31` (wrapping multiplies).
//! * Uniform `[0, 1)`: `(next_u64() >> 11) as f64 * 2^-53`.
//! * Standard normal: Box-Muller using two fresh uniforms `u1`, `u2` per
//!   sample, `sqrt(-2 ln(1 - u1)) * cos(2π u2)`. The sine branch is discarded.

use std::f64::consts::TAU;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform sample in `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }

    pub fn normal_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.normal()).collect()
    }
}

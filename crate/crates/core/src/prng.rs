//! Deterministic SplitMix64 generator.
//!
//! Stands in for the session-secret random process of a careless
//! implementation: whoever controls the seed controls every secret drawn
//! from it. The step function uses the published SplitMix64 constants so
//! that identical seeds give identical streams on every platform.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetPrng {
    state: u64,
}

impl DetPrng {
    pub fn new(seed: u64) -> Self {
        DetPrng { state: seed }
    }

    /// Seeds from operating-system entropy. Used by the secure oracle.
    pub fn from_entropy() -> Self {
        DetPrng::new(rand::random())
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Derives an independent generator, e.g. one per campaign trial.
    pub fn fork(&mut self) -> DetPrng {
        DetPrng::new(self.next_u64())
    }
}

impl Iterator for DetPrng {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        Some(self.next_u64())
    }
}

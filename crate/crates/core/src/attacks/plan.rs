use crate::error::Result;
use crate::feam::DEFAULT_MAX_TRIES;
use crate::linalg::BoolMatrix;
use crate::prng::DetPrng;

/// Four chosen blocks for two sessions at indices `i` and `i + 1`, with the
/// same invertible differential `delta` at both indices.
///
/// For the chosen-plaintext attack the blocks are plaintexts; the
/// chosen-ciphertext attack submits the same shape as ciphertexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialPlan {
    pub index: u64,
    /// Session 1 blocks at `i` and `i + 1`.
    pub first: [BoolMatrix; 2],
    /// Session 2 blocks, `first[t] + delta`.
    pub second: [BoolMatrix; 2],
    pub delta: BoolMatrix,
}

pub type ChosenPlaintextPlan = DifferentialPlan;

impl DifferentialPlan {
    pub fn n(&self) -> usize {
        self.delta.n()
    }

    /// Chosen bits across both sessions: 4n².
    pub fn chosen_bits(&self) -> u64 {
        4 * (self.n() * self.n()) as u64
    }
}

pub fn make_plan(prng: &mut DetPrng, n: usize, index: u64) -> Result<DifferentialPlan> {
    assert!(index >= 1, "block indices start at 1");
    let delta = BoolMatrix::random_invertible(prng, n, DEFAULT_MAX_TRIES)?.matrix;
    let first = [BoolMatrix::random(prng, n), BoolMatrix::random(prng, n)];
    let second = [&first[0] + &delta, &first[1] + &delta];
    Ok(DifferentialPlan {
        index,
        first,
        second,
        delta,
    })
}

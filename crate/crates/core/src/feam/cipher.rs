use super::SessionSecrets;
use crate::error::{Error, Result};
use crate::linalg::BoolMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Encrypt,
    Decrypt,
}

/// Per-session incremental state for the block recurrence.
///
/// Holds, for the next block index `i`, the matrices `K^(n+i)` and
/// `K·V·K^i` (and `K^-(n+i)` when decrypting). Each processed block
/// advances `i` by right-multiplying with `K` (left-multiplying the inverse
/// power with `K⁻¹`), so no power is ever recomputed from scratch.
#[derive(Debug, Clone)]
pub struct CipherState {
    direction: Direction,
    index: u64,
    k: BoolMatrix,
    k_inv: BoolMatrix,
    power: BoolMatrix,
    mask: BoolMatrix,
    power_inv: Option<BoolMatrix>,
}

impl CipherState {
    /// State positioned at block index 1.
    pub fn new(s: &SessionSecrets, direction: Direction) -> Self {
        let n = s.n() as u64;
        let k = s.key();
        let power = k.pow(n + 1);
        let mask = &(k * s.initial()) * k;
        let power_inv = match direction {
            Direction::Encrypt => None,
            Direction::Decrypt => Some(s.key_inverse().pow(n + 1)),
        };
        CipherState {
            direction,
            index: 1,
            k: k.clone(),
            k_inv: s.key_inverse().clone(),
            power,
            mask,
            power_inv,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Index of the next block to be processed.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// `(K^(n+i), K·V·K^i)` for the next index `i`.
    pub fn keystream(&self) -> (&BoolMatrix, &BoolMatrix) {
        (&self.power, &self.mask)
    }

    fn check(&self, block: &BoolMatrix, want: Direction) -> Result<()> {
        if self.direction != want {
            return Err(Error::WrongDirection);
        }
        if block.n() != self.k.n() {
            return Err(Error::DimensionMismatch {
                left: self.k.n(),
                right: block.n(),
            });
        }
        Ok(())
    }

    fn advance(&mut self) {
        self.power = &self.power * &self.k;
        self.mask = &self.mask * &self.k;
        if let Some(inv) = &self.power_inv {
            self.power_inv = Some(&self.k_inv * inv);
        }
        self.index += 1;
    }

    pub fn encrypt_block(&mut self, p: &BoolMatrix) -> Result<BoolMatrix> {
        self.check(p, Direction::Encrypt)?;
        let mut c = &(&self.k * &(p + &self.mask)) * &self.power;
        c += &self.mask;
        self.advance();
        Ok(c)
    }

    pub fn decrypt_block(&mut self, c: &BoolMatrix) -> Result<BoolMatrix> {
        self.check(c, Direction::Decrypt)?;
        let power_inv = self.power_inv.as_ref().expect("decrypt state caches K^-(n+i)");
        let mut p = &(&self.k_inv * &(c + &self.mask)) * power_inv;
        p += &self.mask;
        self.advance();
        Ok(p)
    }
}

use super::bitvec::BitVec;
use super::matrix::BoolMatrix;
use crate::error::{Error, Result};

/// Outcome of solving a linear system over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(BitVec),
    /// Consistent, but the coefficient rank is below the number of unknowns.
    Underdetermined { rank: usize },
    Inconsistent,
}

impl Solution {
    pub fn unique(self) -> Option<BitVec> {
        match self {
            Solution::Unique(x) => Some(x),
            _ => None,
        }
    }
}

/// `m` equations in `unknowns` variables, stored as augmented rows: the
/// coefficient bits followed by the right-hand side bit at column
/// `unknowns`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearSystem {
    unknowns: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl LinearSystem {
    pub fn new(unknowns: usize) -> Self {
        assert!(unknowns >= 1, "a linear system needs at least one unknown");
        LinearSystem {
            unknowns,
            stride: (unknowns + 1).div_ceil(64),
            rows: Vec::new(),
        }
    }

    /// The square system `coeff · x = rhs`.
    pub fn from_parts(coeff: &BoolMatrix, rhs: &BitVec) -> Result<Self> {
        let mut sys = LinearSystem::new(coeff.n());
        sys.push_block(coeff, rhs)?;
        Ok(sys)
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn equations(&self) -> usize {
        self.rows.len() / self.stride
    }

    pub fn push_equation(&mut self, coeffs: &BitVec, rhs: bool) -> Result<()> {
        if coeffs.len() != self.unknowns {
            return Err(Error::DimensionMismatch {
                left: self.unknowns,
                right: coeffs.len(),
            });
        }
        let start = self.rows.len();
        self.rows.extend_from_slice(coeffs.words());
        self.rows.resize(start + self.stride, 0);
        if rhs {
            let u = self.unknowns;
            self.rows[start + u / 64] |= 1 << (u % 64);
        }
        Ok(())
    }

    /// Appends one equation per row of `coeff`.
    pub fn push_block(&mut self, coeff: &BoolMatrix, rhs: &BitVec) -> Result<()> {
        let u = self.unknowns;
        if coeff.n() != u || rhs.len() != u {
            return Err(Error::DimensionMismatch {
                left: u,
                right: if coeff.n() != u { coeff.n() } else { rhs.len() },
            });
        }
        self.rows.reserve(u * self.stride);
        for i in 0..u {
            let start = self.rows.len();
            self.rows.extend_from_slice(coeff.row(i));
            self.rows.resize(start + self.stride, 0);
            if rhs.get(i) {
                self.rows[start + u / 64] |= 1 << (u % 64);
            }
        }
        Ok(())
    }

    pub(crate) fn stride(&self) -> usize {
        self.stride
    }

    pub(crate) fn augmented_rows(&self) -> impl Iterator<Item = &[u64]> {
        self.rows.chunks_exact(self.stride)
    }

    /// Gaussian elimination over GF(2), rows taken in order.
    pub fn solve(&self) -> Solution {
        let mut echelon = Echelon::new(self.unknowns);
        echelon.insert_system(self).expect("same width");
        echelon.solution()
    }
}

/// Incrementally built reduced row echelon form of an augmented system.
///
/// Every stored row has a pivot column that is zero in all other stored
/// rows. An incoming equation is reduced by the stored rows whose pivots it
/// touches; what is left either becomes a new pivot row (cleared out of the
/// older rows), vanishes as dependent, or reduces to `0 = 1` and marks the
/// system inconsistent. Sparse equations therefore cost one row XOR per set
/// pivot bit. The result depends only on the insertion order.
#[derive(Clone)]
pub struct Echelon {
    unknowns: usize,
    stride: usize,
    rows: Vec<u64>,
    pivot_of: Vec<Option<u32>>,
    inconsistent: bool,
}

impl Echelon {
    pub fn new(unknowns: usize) -> Self {
        assert!(unknowns >= 1, "a linear system needs at least one unknown");
        Echelon {
            unknowns,
            stride: (unknowns + 1).div_ceil(64),
            rows: Vec::new(),
            pivot_of: vec![None; unknowns],
            inconsistent: false,
        }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rank(&self) -> usize {
        self.rows.len() / self.stride
    }

    pub fn is_consistent(&self) -> bool {
        !self.inconsistent
    }

    fn insert_row(&mut self, row: &mut [u64]) {
        let (u, s) = (self.unknowns, self.stride);
        // XORing a stored row only changes bits at or right of its pivot and
        // never touches another pivot column, so one left-to-right pass
        // clears every pivot bit.
        let mut leading = None;
        for w in 0..s {
            let mut pending = row[w];
            while pending != 0 {
                let col = w * 64 + pending.trailing_zeros() as usize;
                pending &= pending - 1;
                if col >= u {
                    break;
                }
                match self.pivot_of[col] {
                    Some(r) => {
                        let r = r as usize;
                        let stored = &self.rows[r * s..(r + 1) * s];
                        for (d, p) in row[w..].iter_mut().zip(&stored[w..]) {
                            *d ^= p;
                        }
                        pending = row[w] & !((2u64 << (col % 64)).wrapping_sub(1));
                    }
                    None => {
                        leading.get_or_insert(col);
                    }
                }
            }
        }
        let Some(col) = leading else {
            if row[u / 64] >> (u % 64) & 1 == 1 {
                self.inconsistent = true;
            }
            return;
        };
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        for stored in self.rows.chunks_exact_mut(s) {
            if stored[w] & bit != 0 {
                for (d, p) in stored[w..].iter_mut().zip(&row[w..]) {
                    *d ^= p;
                }
            }
        }
        self.pivot_of[col] = Some(self.rank() as u32);
        self.rows.extend_from_slice(row);
    }

    pub fn insert_system(&mut self, sys: &LinearSystem) -> Result<()> {
        if sys.unknowns() != self.unknowns {
            return Err(Error::DimensionMismatch {
                left: self.unknowns,
                right: sys.unknowns(),
            });
        }
        debug_assert_eq!(sys.stride(), self.stride);
        let mut scratch = vec![0u64; self.stride];
        for row in sys.augmented_rows() {
            scratch.copy_from_slice(row);
            self.insert_row(&mut scratch);
        }
        Ok(())
    }

    pub fn solution(&self) -> Solution {
        let (u, s) = (self.unknowns, self.stride);
        if self.inconsistent {
            return Solution::Inconsistent;
        }
        let rank = self.rank();
        if rank < u {
            return Solution::Underdetermined { rank };
        }
        // Full rank in reduced form: each row reads `x[col] = rhs`.
        let mut x = vec![0u64; u.div_ceil(64)];
        for (col, r) in self.pivot_of.iter().enumerate() {
            let r = r.expect("full rank") as usize;
            if self.rows[r * s + u / 64] >> (u % 64) & 1 == 1 {
                x[col / 64] |= 1 << (col % 64);
            }
        }
        Solution::Unique(BitVec::from_words(u, x))
    }
}

impl std::fmt::Debug for Echelon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Echelon")
            .field("unknowns", &self.unknowns)
            .field("rank", &self.rank())
            .field("consistent", &self.is_consistent())
            .finish()
    }
}

impl std::fmt::Debug for LinearSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearSystem")
            .field("equations", &self.equations())
            .field("unknowns", &self.unknowns)
            .finish()
    }
}

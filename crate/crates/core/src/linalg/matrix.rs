use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use num_bigint::BigUint;

use super::bitvec::BitVec;
use crate::error::{Error, Result};
use crate::prng::DetPrng;

/// Largest supported dimension. The Kronecker lifting of an n×n matrix
/// equation needs n² unknowns, so the cap keeps solver memory bounded.
pub const MAX_DIM: usize = 4096;

pub fn check_dimension(n: usize) -> Result<usize> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(n)
    } else {
        Err(Error::InvalidDimension(n))
    }
}

/// Square n×n matrix over GF(2).
///
/// Rows are packed row-major, least-significant bit first, into `stride`
/// 64-bit words each. Bits past column `n - 1` are always zero, which lets
/// equality, hashing and serialization work on the raw words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

#[inline]
fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl BoolMatrix {
    /// # Panics
    ///
    /// Panics if `n` is 0 or larger than [`MAX_DIM`].
    pub fn zero(n: usize) -> Self {
        assert!(check_dimension(n).is_ok(), "invalid matrix dimension {n}");
        let stride = n.div_ceil(64);
        BoolMatrix {
            n,
            stride,
            words: vec![0; n * stride],
        }
    }

    /// # Panics
    ///
    /// Panics if `n` is 0 or larger than [`MAX_DIM`].
    pub fn identity(n: usize) -> Self {
        let mut m = BoolMatrix::zero(n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BoolMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = check_dimension(rows.len())?;
        let mut m = BoolMatrix::zero(n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            for (j, &bit) in row.iter().enumerate() {
                match bit {
                    0 => {}
                    1 => m.set(i, j, true),
                    other => return Err(Error::Format(format!("entry {other} is not a bit"))),
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from packed row words; padding bits are cleared.
    pub(crate) fn from_row_words(n: usize, stride: usize, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(stride, n.div_ceil(64));
        debug_assert_eq!(words.len(), n * stride);
        let mask = tail_mask(n);
        for row in words.chunks_mut(stride) {
            row[stride - 1] &= mask;
        }
        BoolMatrix { n, stride, words }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        self.words[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        let w = &mut self.words[i * self.stride + j / 64];
        let mask = 1u64 << (j % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_identity(&self) -> bool {
        *self == BoolMatrix::identity(self.n)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn debug_check_padding(&self) {
        if cfg!(debug_assertions) {
            let mask = tail_mask(self.n);
            for row in self.words.chunks(self.stride) {
                assert_eq!(row[self.stride - 1] & !mask, 0, "padding bits set");
            }
        }
    }

    fn same_dim(&self, other: &BoolMatrix) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn checked_add(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        self.same_dim(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        let out = BoolMatrix {
            n: self.n,
            stride: self.stride,
            words,
        };
        out.debug_check_padding();
        Ok(out)
    }

    /// Row-by-row accumulation: for each set bit k of row i of `self`,
    /// row k of `other` is XORed into row i of the product.
    pub fn checked_mul(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        self.same_dim(other)?;
        let s = self.stride;
        let mut out = BoolMatrix::zero(self.n);
        for i in 0..self.n {
            let dst = &mut out.words[i * s..(i + 1) * s];
            for (w, &word) in self.row(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let k = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    for (d, src) in dst.iter_mut().zip(other.row(k)) {
                        *d ^= src;
                    }
                }
            }
        }
        out.debug_check_padding();
        Ok(out)
    }

    pub fn transpose(&self) -> BoolMatrix {
        let mut out = BoolMatrix::zero(self.n);
        for i in 0..self.n {
            for (w, &word) in self.row(i).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let j = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    out.set(j, i, true);
                }
            }
        }
        out
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(None)
    }

    /// Gauss–Jordan elimination; the pivot for each column is the lowest
    /// eligible row with that bit set. When `companion` is given, every row
    /// operation is mirrored onto it. Returns the rank.
    fn eliminate(&mut self, mut companion: Option<&mut BoolMatrix>) -> usize {
        let (n, s) = (self.n, self.stride);
        let mut rank = 0;
        for col in 0..n {
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(pivot) = (rank..n).find(|&r| self.words[r * s + w] & bit != 0) else {
                continue;
            };
            if pivot != rank {
                swap_rows(&mut self.words, s, pivot, rank);
                if let Some(c) = companion.as_deref_mut() {
                    swap_rows(&mut c.words, s, pivot, rank);
                }
            }
            for r in 0..n {
                if r != rank && self.words[r * s + w] & bit != 0 {
                    xor_row(&mut self.words, s, rank, r, w);
                    if let Some(c) = companion.as_deref_mut() {
                        xor_row(&mut c.words, s, rank, r, 0);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn inverse(&self) -> Result<BoolMatrix> {
        let mut work = self.clone();
        let mut inv = BoolMatrix::identity(self.n);
        if work.eliminate(Some(&mut inv)) < self.n {
            return Err(Error::NotInvertible);
        }
        inv.debug_check_padding();
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Square-and-multiply; `pow(0)` is the identity.
    pub fn pow(&self, mut e: u64) -> BoolMatrix {
        let mut result = BoolMatrix::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn pow_big(&self, e: &BigUint) -> BoolMatrix {
        let mut result = BoolMatrix::identity(self.n);
        for i in (0..e.bits()).rev() {
            result = &result * &result;
            if e.bit(i) {
                result = &result * self;
            }
        }
        result
    }

    /// Kronecker product; the result has dimension `self.n * other.n`.
    pub fn kron(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        let (a, b) = (self.n, other.n);
        let n = check_dimension(a * b)?;
        let mut out = BoolMatrix::zero(n);
        for i in 0..a {
            for j in 0..a {
                if !self.get(i, j) {
                    continue;
                }
                for k in 0..b {
                    for (w, &word) in other.row(k).iter().enumerate() {
                        let mut bits = word;
                        while bits != 0 {
                            let l = w * 64 + bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            out.set(i * b + k, j * b + l, true);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Column-major flattening: entry (i, j) lands at index `j * n + i`.
    pub fn vec_col(&self) -> BitVec {
        let n = self.n;
        let mut v = BitVec::zeros(n * n);
        for i in 0..n {
            for j in 0..n {
                if self.get(i, j) {
                    v.set(j * n + i, true);
                }
            }
        }
        v
    }

    pub fn from_vec_col(n: usize, v: &BitVec) -> Result<BoolMatrix> {
        check_dimension(n)?;
        if v.len() != n * n {
            return Err(Error::DimensionMismatch {
                left: n * n,
                right: v.len(),
            });
        }
        Ok(BoolMatrix::from_fn(n, |i, j| v.get(j * n + i)))
    }

    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.n);
        for i in 0..self.n {
            let parity = self
                .row(i)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            out.set(i, parity & 1 == 1);
        }
        Ok(out)
    }

    /// Draws every row as `stride` consecutive generator outputs, masking
    /// the final word of each row down to the remaining columns.
    pub fn random(prng: &mut DetPrng, n: usize) -> BoolMatrix {
        let mut m = BoolMatrix::zero(n);
        let mask = tail_mask(n);
        let s = m.stride;
        for i in 0..n {
            let row = m.row_mut(i);
            for w in row.iter_mut() {
                *w = prng.next_u64();
            }
            row[s - 1] &= mask;
        }
        m
    }

    /// Rejection-samples [`BoolMatrix::random`] until an invertible matrix
    /// comes up.
    pub fn random_invertible(prng: &mut DetPrng, n: usize, max_tries: u32) -> Result<InvertibleSample> {
        for tries in 1..=max_tries {
            let matrix = BoolMatrix::random(prng, n);
            if let Ok(inverse) = matrix.inverse() {
                return Ok(InvertibleSample {
                    matrix,
                    inverse,
                    tries,
                });
            }
        }
        Err(Error::Exhausted(max_tries))
    }
}

#[derive(Debug, Clone)]
pub struct InvertibleSample {
    pub matrix: BoolMatrix,
    pub inverse: BoolMatrix,
    pub tries: u32,
}

fn swap_rows(words: &mut [u64], stride: usize, a: usize, b: usize) {
    let (lo, hi) = (a.min(b), a.max(b));
    let (head, tail) = words.split_at_mut(hi * stride);
    head[lo * stride..(lo + 1) * stride].swap_with_slice(&mut tail[..stride]);
}

/// `row[dst] ^= row[src]`, starting at word `from`. Words left of the
/// current pivot column no longer take part in pivot selection.
fn xor_row(words: &mut [u64], stride: usize, src: usize, dst: usize, from: usize) {
    debug_assert_ne!(src, dst);
    let (s, d) = if src < dst {
        let (head, tail) = words.split_at_mut(dst * stride);
        (&head[src * stride..(src + 1) * stride], &mut tail[..stride])
    } else {
        let (head, tail) = words.split_at_mut(src * stride);
        (&tail[..stride] as &[u64], &mut head[dst * stride..(dst + 1) * stride])
    };
    for (d, s) in d[from..].iter_mut().zip(&s[from..]) {
        *d ^= s;
    }
}

impl Add for &BoolMatrix {
    type Output = BoolMatrix;

    /// # Panics
    ///
    /// Panics on dimension mismatch; use [`BoolMatrix::checked_add`] otherwise.
    fn add(self, rhs: &BoolMatrix) -> BoolMatrix {
        self.checked_add(rhs).expect("matrix addition")
    }
}

impl AddAssign<&BoolMatrix> for BoolMatrix {
    fn add_assign(&mut self, rhs: &BoolMatrix) {
        assert_eq!(self.n, rhs.n, "matrix addition");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl Mul for &BoolMatrix {
    type Output = BoolMatrix;

    /// # Panics
    ///
    /// Panics on dimension mismatch; use [`BoolMatrix::checked_mul`] otherwise.
    fn mul(self, rhs: &BoolMatrix) -> BoolMatrix {
        self.checked_mul(rhs).expect("matrix multiplication")
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BoolMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            let row: String = (0..self.n)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

//! Dense linear algebra over GF(2) on bit-packed matrices.

mod bitvec;
pub mod format;
mod matrix;
mod solve;

pub use bitvec::BitVec;
pub use matrix::{check_dimension, BoolMatrix, InvertibleSample, MAX_DIM};
pub use solve::{Echelon, LinearSystem, Solution};

//! The improved FEA-M Boolean-matrix block cipher together with the
//! differential chosen-plaintext and chosen-ciphertext attacks that break
//! it when its session-secret generator can be forced to repeat.
//!
//! * [`linalg`]: bit-packed GF(2) matrices, elimination, Kronecker lifting.
//! * [`feam`]: key distribution and the block recurrence.
//! * [`oracle`]: simulated machines with a tamperable random process.
//! * [`attacks`]: key and initial-matrix recovery.
//! * [`keyspace`]: key order in GL(n, 2) and weak-key screening.
//! * [`campaign`]: repeated trials scored against planted secrets.

pub mod attacks;
pub mod campaign;
mod error;
pub mod feam;
pub mod keyspace;
pub mod linalg;
pub mod oracle;
mod prng;

pub use error::{Error, Result};
pub use linalg::{BitVec, BoolMatrix};
pub use prng::DetPrng;

//! The improved FEA-M cryptosystem.
//!
//! Two stages: the sender draws a session key `K` (invertible) and an
//! initial matrix `V`, wraps them under the shared master key `K0` as
//! `K* = K0·K⁻¹·K0` and `V* = K0·V·K0`; afterwards every n×n block is
//! processed as
//!
//! ```text
//! C_i = K·(P_i + K·V·K^i)·K^(n+i) + K·V·K^i
//! P_i = K⁻¹·(C_i + K·V·K^i)·K^-(n+i) + K·V·K^i
//! ```
//!
//! with block indices starting at 1.

mod cipher;
mod stream;

pub use cipher::{CipherState, Direction};
pub use stream::{decrypt_stream, encrypt_stream, frame_stream, unframe_stream};

use crate::error::{Error, Result};
use crate::linalg::{check_dimension, format, BoolMatrix};
use crate::prng::DetPrng;

/// Rejection-sampling budget for drawing an invertible session key. The
/// acceptance rate is about 0.29 for every n ≥ 4.
pub const DEFAULT_MAX_TRIES: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterKey {
    k0: BoolMatrix,
    k0_inv: BoolMatrix,
}

impl MasterKey {
    pub fn new(k0: BoolMatrix) -> Result<Self> {
        let k0_inv = k0.inverse()?;
        Ok(MasterKey { k0, k0_inv })
    }

    pub fn generate(prng: &mut DetPrng, n: usize) -> Result<Self> {
        check_dimension(n)?;
        let s = BoolMatrix::random_invertible(prng, n, DEFAULT_MAX_TRIES)?;
        Ok(MasterKey {
            k0: s.matrix,
            k0_inv: s.inverse,
        })
    }

    pub fn n(&self) -> usize {
        self.k0.n()
    }

    pub fn matrix(&self) -> &BoolMatrix {
        &self.k0
    }

    pub fn inverse(&self) -> &BoolMatrix {
        &self.k0_inv
    }
}

/// Session key `K`, its inverse, and the initial matrix `V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionSecrets {
    k: BoolMatrix,
    k_inv: BoolMatrix,
    v: BoolMatrix,
}

impl SessionSecrets {
    pub fn new(k: BoolMatrix, v: BoolMatrix) -> Result<Self> {
        if k.n() != v.n() {
            return Err(Error::DimensionMismatch {
                left: k.n(),
                right: v.n(),
            });
        }
        let k_inv = k.inverse()?;
        Ok(SessionSecrets { k, k_inv, v })
    }

    pub fn n(&self) -> usize {
        self.k.n()
    }

    pub fn key(&self) -> &BoolMatrix {
        &self.k
    }

    pub fn key_inverse(&self) -> &BoolMatrix {
        &self.k_inv
    }

    pub fn initial(&self) -> &BoolMatrix {
        &self.v
    }

    /// Session file bytes: the K record followed by the V record.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.k.to_bytes();
        out.extend(self.v.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        match <[BoolMatrix; 2]>::try_from(format::read_records(bytes)?) {
            Ok([k, v]) => SessionSecrets::new(k, v),
            Err(records) => Err(Error::Format(format!(
                "session file holds {} records, expected 2",
                records.len()
            ))),
        }
    }
}

/// The wrapped pair `(K*, V*)` sent to the receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionMessage {
    pub k_star: BoolMatrix,
    pub v_star: BoolMatrix,
}

/// Draws `K` (rejection-sampled until invertible) and then `V` from the
/// generator. The draw order is fixed: equal seeds give equal secrets.
pub fn keygen_session(prng: &mut DetPrng, n: usize) -> Result<SessionSecrets> {
    check_dimension(n)?;
    let k = BoolMatrix::random_invertible(prng, n, DEFAULT_MAX_TRIES)?;
    let v = BoolMatrix::random(prng, n);
    Ok(SessionSecrets {
        k: k.matrix,
        k_inv: k.inverse,
        v,
    })
}

/// Sender side: `K* = K0·K⁻¹·K0`, `V* = K0·V·K0`.
pub fn distribute(master: &MasterKey, s: &SessionSecrets) -> Result<DistributionMessage> {
    let k0 = &master.k0;
    Ok(DistributionMessage {
        k_star: k0.checked_mul(&s.k_inv)?.checked_mul(k0)?,
        v_star: k0.checked_mul(&s.v)?.checked_mul(k0)?,
    })
}

/// Receiver side: `K⁻¹ = K0⁻¹·K*·K0⁻¹`, `V = K0⁻¹·V*·K0⁻¹`, then `K` by
/// inversion. A singular transported `K⁻¹` means the message was corrupted.
pub fn recover(master: &MasterKey, msg: &DistributionMessage) -> Result<SessionSecrets> {
    let inv = &master.k0_inv;
    let k_inv = inv.checked_mul(&msg.k_star)?.checked_mul(inv)?;
    let v = inv.checked_mul(&msg.v_star)?.checked_mul(inv)?;
    let k = k_inv.inverse()?;
    Ok(SessionSecrets { k, k_inv, v })
}

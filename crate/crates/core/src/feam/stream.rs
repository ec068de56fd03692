//! Byte framing over the block cipher.
//!
//! Plaintext bytes are read as a bit stream (LSB-first within each byte)
//! and cut into n²-bit blocks filled row-major. The stream is terminated by
//! a single 1 bit followed by zeros up to the next block boundary, so a
//! plaintext ending exactly on a boundary gets one whole padding block.
//! Each ciphertext block is written as `n` packed rows of `ceil(n / 8)`
//! bytes, the row layout of the matrix file format.
//!
//! There is no integrity protection: a modified ciphertext either fails the
//! padding check or decrypts to different plaintext.

use super::cipher::{CipherState, Direction};
use super::SessionSecrets;
use crate::error::{Error, Result};
use crate::linalg::{check_dimension, format::row_bytes, BoolMatrix};

fn bit(bytes: &[u8], t: usize) -> bool {
    bytes.get(t / 8).is_some_and(|b| b >> (t % 8) & 1 == 1)
}

/// Plaintext bits `[start, start + n²)` as a block; the bit at
/// `data_bits` is the padding marker and everything after it is zero.
fn read_block(data: &[u8], data_bits: usize, start: usize, n: usize) -> BoolMatrix {
    if n.is_multiple_of(8) && start + n * n <= data_bits {
        return BoolMatrix::read_rows(n, &data[start / 8..(start + n * n) / 8])
            .expect("n % 8 == 0 leaves no padding bits");
    }
    BoolMatrix::from_fn(n, |r, c| {
        let t = start + r * n + c;
        t == data_bits || (t < data_bits && bit(data, t))
    })
}

pub fn encrypt_stream(s: &SessionSecrets, bytes: &[u8]) -> Vec<u8> {
    let n = s.n();
    let block_bits = n * n;
    let data_bits = bytes.len() * 8;
    let blocks = data_bits / block_bits + 1;
    let mut out = Vec::with_capacity(blocks * n * row_bytes(n));
    let mut st = CipherState::new(s, Direction::Encrypt);
    for b in 0..blocks {
        let p = read_block(bytes, data_bits, b * block_bits, n);
        st.encrypt_block(&p)
            .expect("block dimension matches the session")
            .write_rows(&mut out);
    }
    out
}

pub fn decrypt_stream(s: &SessionSecrets, bytes: &[u8]) -> Result<Vec<u8>> {
    let n = s.n();
    let block_len = n * row_bytes(n);
    if bytes.is_empty() || !bytes.len().is_multiple_of(block_len) {
        return Err(Error::BadLength(bytes.len()));
    }
    let blocks = bytes.len() / block_len;
    let block_bits = n * n;
    let mut bits_out = vec![0u8; (blocks * block_bits).div_ceil(8)];
    let mut st = CipherState::new(s, Direction::Decrypt);
    for (b, chunk) in bytes.chunks_exact(block_len).enumerate() {
        let c = BoolMatrix::read_rows(n, chunk)?;
        let p = st.decrypt_block(&c)?;
        let base = b * block_bits;
        if n.is_multiple_of(8) {
            let mut rows = Vec::with_capacity(block_len);
            p.write_rows(&mut rows);
            bits_out[base / 8..base / 8 + block_len].copy_from_slice(&rows);
        } else {
            for r in 0..n {
                for col in 0..n {
                    if p.get(r, col) {
                        let t = base + r * n + col;
                        bits_out[t / 8] |= 1 << (t % 8);
                    }
                }
            }
        }
    }

    let last_block_start = (blocks - 1) * block_bits;
    let marker = bits_out
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &b)| b != 0)
        .map(|(i, &b)| i * 8 + 7 - b.leading_zeros() as usize)
        .ok_or(Error::BadPadding)?;
    if marker < last_block_start || marker % 8 != 0 {
        return Err(Error::BadPadding);
    }
    bits_out.truncate(marker / 8);
    Ok(bits_out)
}

/// Stream file: little-endian u32 `n`, then the ciphertext blocks.
pub fn frame_stream(n: usize, ciphertext: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + ciphertext.len());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(ciphertext);
    out
}

pub fn unframe_stream(bytes: &[u8]) -> Result<(usize, &[u8])> {
    if bytes.len() < 4 {
        return Err(Error::BadLength(bytes.len()));
    }
    let n = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
    check_dimension(n)?;
    Ok((n, &bytes[4..]))
}

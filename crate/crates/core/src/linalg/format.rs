//! Binary matrix records.
//!
//! Layout: the magic `GF2M`, a version byte (1), the dimension `n` as a
//! little-endian u32, then `n` rows of `ceil(n / 8)` bytes each. Bits are
//! LSB-first within a byte and padding bits must be zero. Records can be
//! concatenated; a session key file is the K record followed by the V
//! record.

use super::matrix::{check_dimension, BoolMatrix};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GF2M";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 9;

pub fn row_bytes(n: usize) -> usize {
    n.div_ceil(8)
}

impl BoolMatrix {
    /// Appends the packed rows only (no header).
    pub fn write_rows(&self, out: &mut Vec<u8>) {
        let rb = row_bytes(self.n());
        for i in 0..self.n() {
            out.extend(self.row(i).iter().flat_map(|w| w.to_le_bytes()).take(rb));
        }
    }

    /// Parses `n` packed rows (no header) from the front of `bytes`.
    pub fn read_rows(n: usize, bytes: &[u8]) -> Result<BoolMatrix> {
        check_dimension(n)?;
        let rb = row_bytes(n);
        if bytes.len() < n * rb {
            return Err(Error::Format(format!(
                "need {} row bytes, have {}",
                n * rb,
                bytes.len()
            )));
        }
        let stride = n.div_ceil(64);
        let mut words = vec![0u64; n * stride];
        for (i, row) in bytes[..n * rb].chunks_exact(rb).enumerate() {
            if !n.is_multiple_of(8) && row[rb - 1] >> (n % 8) != 0 {
                return Err(Error::Format(format!("padding bits set in row {i}")));
            }
            for (k, chunk) in row.chunks(8).enumerate() {
                let mut buf = [0u8; 8];
                buf[..chunk.len()].copy_from_slice(chunk);
                words[i * stride + k] = u64::from_le_bytes(buf);
            }
        }
        Ok(BoolMatrix::from_row_words(n, stride, words))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.n() * row_bytes(self.n()));
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.n() as u32).to_le_bytes());
        self.write_rows(&mut out);
        out
    }

    /// Parses one record from the front of `bytes`, returning the matrix and
    /// the number of bytes consumed.
    pub fn from_bytes_prefix(bytes: &[u8]) -> Result<(BoolMatrix, usize)> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format("truncated header".into()));
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::Format(format!("unsupported version {}", bytes[4])));
        }
        let n = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
        let m = BoolMatrix::read_rows(n, &bytes[HEADER_LEN..])?;
        Ok((m, HEADER_LEN + n * row_bytes(n)))
    }

    /// Parses exactly one record.
    pub fn from_bytes(bytes: &[u8]) -> Result<BoolMatrix> {
        let (m, used) = BoolMatrix::from_bytes_prefix(bytes)?;
        if used != bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes", bytes.len() - used)));
        }
        Ok(m)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(text: &str) -> Result<BoolMatrix> {
        let bytes = hex::decode(text.trim()).map_err(|e| Error::Format(e.to_string()))?;
        BoolMatrix::from_bytes(&bytes)
    }
}

/// Parses a concatenation of records.
pub fn read_records(mut bytes: &[u8]) -> Result<Vec<BoolMatrix>> {
    let mut out = Vec::new();
    while !bytes.is_empty() {
        let (m, used) = BoolMatrix::from_bytes_prefix(bytes)?;
        out.push(m);
        bytes = &bytes[used..];
    }
    Ok(out)
}

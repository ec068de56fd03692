//! Unpacked reference implementations used as test oracles. Nothing here
//! touches the packed representation except the conversions.

#![allow(dead_code)]

use feam_core::{BitVec, BoolMatrix, DetPrng};

pub type Naive = Vec<Vec<u8>>;

pub fn unpack(m: &BoolMatrix) -> Naive {
    (0..m.n())
        .map(|i| (0..m.n()).map(|j| m.get(i, j) as u8).collect())
        .collect()
}

pub fn pack(m: &Naive) -> BoolMatrix {
    BoolMatrix::from_rows(m).unwrap()
}

pub fn random_naive(prng: &mut DetPrng, n: usize) -> Naive {
    (0..n)
        .map(|_| (0..n).map(|_| (prng.next_u64() >> 17) as u8 & 1).collect())
        .collect()
}

pub fn naive_identity(n: usize) -> Naive {
    (0..n)
        .map(|i| (0..n).map(|j| (i == j) as u8).collect())
        .collect()
}

pub fn naive_add(a: &Naive, b: &Naive) -> Naive {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p ^ q).collect())
        .collect()
}

/// Triple loop with AND as product and XOR as sum.
pub fn naive_mul(a: &Naive, b: &Naive) -> Naive {
    let n = a.len();
    let mut out = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0;
            for k in 0..n {
                acc ^= a[i][k] & b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn naive_pow(a: &Naive, e: u64) -> Naive {
    (0..e).fold(naive_identity(a.len()), |acc, _| naive_mul(&acc, a))
}

pub fn naive_transpose(a: &Naive) -> Naive {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

/// Reduces the augmented rows `[coeff | rhs]` in place; returns pivot
/// columns in row order.
fn naive_rref(rows: &mut [Vec<u8>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] == 1) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] == 1 {
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn naive_rank(a: &Naive) -> usize {
    let mut rows = a.clone();
    naive_rref(&mut rows, a.len()).len()
}

pub fn naive_inverse(a: &Naive) -> Option<Naive> {
    let n = a.len();
    let mut rows: Vec<Vec<u8>> = a
        .iter()
        .zip(naive_identity(n))
        .map(|(r, e)| r.iter().copied().chain(e).collect())
        .collect();
    if naive_rref(&mut rows, n).len() < n {
        return None;
    }
    Some(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[derive(Debug, PartialEq, Eq)]
pub enum NaiveSolution {
    Unique(Vec<u8>),
    Underdetermined,
    Inconsistent,
}

pub fn naive_solve(coeff: &Naive, rhs: &[u8]) -> NaiveSolution {
    let u = coeff[0].len();
    let mut rows: Vec<Vec<u8>> = coeff
        .iter()
        .zip(rhs)
        .map(|(r, &b)| r.iter().copied().chain([b]).collect())
        .collect();
    let pivots = naive_rref(&mut rows, u);
    if rows[pivots.len()..].iter().any(|r| r[u] == 1) {
        return NaiveSolution::Inconsistent;
    }
    if pivots.len() < u {
        return NaiveSolution::Underdetermined;
    }
    NaiveSolution::Unique(rows[..u].iter().map(|r| r[u]).collect())
}

pub fn naive_kron(a: &Naive, b: &Naive) -> Naive {
    let (p, q) = (a.len(), b.len());
    let mut out = vec![vec![0u8; p * q]; p * q];
    for i in 0..p {
        for j in 0..p {
            for k in 0..q {
                for l in 0..q {
                    out[i * q + k][j * q + l] = a[i][j] & b[k][l];
                }
            }
        }
    }
    out
}

pub fn naive_vec_col(a: &Naive) -> Vec<u8> {
    let n = a.len();
    (0..n * n).map(|t| a[t % n][t / n]).collect()
}

pub fn naive_mul_vec(a: &Naive, x: &[u8]) -> Vec<u8> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(0, |acc, (p, q)| acc ^ (p & q)))
        .collect()
}

pub fn to_bitvec(bits: &[u8]) -> BitVec {
    BitVec::from_bools(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
}

pub fn from_bitvec(v: &BitVec) -> Vec<u8> {
    v.iter().map(u8::from).collect()
}

/// Direct evaluation of `C_i = K(P_i + KVK^i)K^(n+i) + KVK^i` from scratch.
pub fn encrypt_direct(k: &Naive, v: &Naive, i: u64, p: &Naive) -> Naive {
    let n = k.len() as u64;
    let m = naive_mul(&naive_mul(k, v), &naive_pow(k, i));
    naive_add(
        &naive_mul(&naive_mul(k, &naive_add(p, &m)), &naive_pow(k, n + i)),
        &m,
    )
}

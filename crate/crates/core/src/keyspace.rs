//! Session-key strength: the order of `K` in GL(n, 2).
//!
//! The index-dependent part of the cipher, `(K^(n+i), K·V·K^i)`, repeats
//! with period `o(K)`, the multiplicative order of the key. Keys with small
//! order (the identity most of all) give a cipher with a short period, so a
//! careful implementation screens them out.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::feam::{SessionSecrets, DEFAULT_MAX_TRIES};
use crate::linalg::BoolMatrix;
use crate::prng::DetPrng;

/// Default screening threshold for strict key generation.
pub const DEFAULT_MIN_ORDER: u64 = 1 << 16;

/// Largest dimension for which the order is computed exactly from the
/// factored group order.
pub const EXACT_ORDER_MAX_DIM: usize = 16;

/// `|GL(n, 2)| = ∏_{i=0}^{n-1} (2^n - 2^i)`.
pub fn group_order(n: usize) -> BigUint {
    assert!(n >= 1, "group order needs n >= 1");
    let two_n = BigUint::from(1u32) << n;
    (0..n).fold(BigUint::from(1u32), |acc, i| {
        acc * (&two_n - (BigUint::from(1u32) << i))
    })
}

/// Prime factorization of `|GL(n, 2)| = 2^(n(n-1)/2) · ∏_{k=1}^{n} (2^k - 1)`,
/// as `(prime, exponent)` pairs in increasing prime order.
fn group_order_factors(n: usize) -> Vec<(u64, u32)> {
    assert!(n <= 63);
    let mut factors: BTreeMap<u64, u32> = BTreeMap::new();
    if n > 1 {
        factors.insert(2, (n * (n - 1) / 2) as u32);
    }
    for k in 1..=n {
        let mut m = (1u64 << k) - 1;
        let mut p = 3;
        while p * p <= m {
            while m.is_multiple_of(p) {
                *factors.entry(p).or_default() += 1;
                m /= p;
            }
            p += 2;
        }
        if m > 1 {
            *factors.entry(m).or_default() += 1;
        }
    }
    factors.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Exact(u64),
    /// `K^e ≠ I` for every `1 ≤ e ≤ bound`.
    BoundExceeded { bound: u64 },
}

/// Multiplicative order of `k`.
///
/// For `n ≤ 16` the order is found exactly by dividing prime factors out of
/// the group order while `K^(e/p) = I` still holds; `bound` is not used.
/// Larger keys are multiplied out step by step up to `bound`.
pub fn element_order(k: &BoolMatrix, bound: u64) -> Result<Order> {
    if !k.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let n = k.n();
    if n <= EXACT_ORDER_MAX_DIM {
        let group = group_order(n);
        let mut e = group.clone();
        for (p, a) in group_order_factors(n) {
            let p = BigUint::from(p);
            for _ in 0..a {
                let candidate = &e / &p;
                if k.pow_big(&candidate).is_identity() {
                    e = candidate;
                } else {
                    break;
                }
            }
        }
        debug_assert!(k.pow_big(&e).is_identity());
        assert_eq!(&group % &e, BigUint::from(0u32), "order divides |GL(n,2)|");
        let order = u64::try_from(&e).expect("element orders in GL(16,2) fit in u64");
        return Ok(Order::Exact(order));
    }
    let mut power = k.clone();
    for e in 1..=bound {
        if power.is_identity() {
            return Ok(Order::Exact(e));
        }
        power = &power * k;
    }
    Ok(Order::BoundExceeded { bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Screening {
    Accept(Order),
    Reject(u64),
}

impl Screening {
    pub fn accepted(&self) -> bool {
        matches!(self, Screening::Accept(_))
    }
}

/// Rejects keys whose order is at most `min_order`.
pub fn screen_key(k: &BoolMatrix, min_order: u64) -> Result<Screening> {
    Ok(match element_order(k, min_order)? {
        Order::Exact(o) if o <= min_order => Screening::Reject(o),
        order => Screening::Accept(order),
    })
}

/// Like [`crate::feam::keygen_session`], but `K` is redrawn until it passes
/// [`screen_key`]. `V` is drawn once, after the accepted `K`.
pub fn keygen_session_strict(
    prng: &mut DetPrng,
    n: usize,
    min_order: u64,
    max_attempts: u32,
) -> Result<SessionSecrets> {
    for _ in 0..max_attempts {
        let k = BoolMatrix::random_invertible(prng, n, DEFAULT_MAX_TRIES)?;
        if screen_key(&k.matrix, min_order)?.accepted() {
            let v = BoolMatrix::random(prng, n);
            return SessionSecrets::new(k.matrix, v);
        }
    }
    Err(Error::ScreeningExhausted(max_attempts))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyAnalysis {
    pub n: usize,
    pub order: Order,
    pub group_order: BigUint,
    pub min_order: u64,
    pub weak: bool,
}

pub fn analyze_key(k: &BoolMatrix, min_order: u64) -> Result<KeyAnalysis> {
    let screening = screen_key(k, min_order)?;
    let order = match screening {
        Screening::Accept(order) => order,
        Screening::Reject(o) => Order::Exact(o),
    };
    Ok(KeyAnalysis {
        n: k.n(),
        order,
        group_order: group_order(k.n()),
        min_order,
        weak: !screening.accepted(),
    })
}

impl KeyAnalysis {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n={}", self.n).unwrap();
        match self.order {
            Order::Exact(o) => writeln!(out, "order={o}").unwrap(),
            Order::BoundExceeded { bound } => writeln!(out, "order=>{bound}").unwrap(),
        }
        writeln!(out, "group_order={}", self.group_order).unwrap();
        writeln!(out, "min_order={}", self.min_order).unwrap();
        let verdict = if self.weak { "reject" } else { "accept" };
        writeln!(out, "verdict={verdict}").unwrap();
        out
    }
}

/// Orders of `samples` random invertible keys, as `order -> count`.
pub fn order_histogram(prng: &mut DetPrng, n: usize, samples: usize) -> Result<BTreeMap<u64, usize>> {
    assert!(n <= EXACT_ORDER_MAX_DIM, "exact orders need n <= {EXACT_ORDER_MAX_DIM}");
    let mut hist = BTreeMap::new();
    for _ in 0..samples {
        let k = BoolMatrix::random_invertible(prng, n, DEFAULT_MAX_TRIES)?.matrix;
        if let Order::Exact(o) = element_order(&k, u64::MAX)? {
            *hist.entry(o).or_insert(0) += 1;
        }
    }
    Ok(hist)
}

mod common;

use common::*;
use feam_core::keyspace::{element_order, group_order, order_histogram, screen_key, Order};
use feam_core::{BoolMatrix, DetPrng};
use num_bigint::BigUint;
use proptest::prelude::*;

fn enumerate_invertible(n: usize) -> u64 {
    let cells = n * n;
    (0u64..1 << cells)
        .filter(|bits| {
            let m = BoolMatrix::from_fn(n, |i, j| bits >> (i * n + j) & 1 == 1);
            naive_rank(&unpack(&m)) == n
        })
        .count() as u64
}

#[test]
fn group_order_matches_enumeration() {
    for n in 1..=4 {
        assert_eq!(group_order(n), BigUint::from(enumerate_invertible(n)), "n={n}");
    }
}

#[test]
fn small_key_orders_are_rare() {
    let mut prng = DetPrng::new(2024);
    let samples = 10_000;
    let hist = order_histogram(&mut prng, 8, samples).unwrap();
    let weak: usize = hist.range(..=4).map(|(_, c)| c).sum();
    let rate = weak as f64 / samples as f64;
    eprintln!("n=8 min_order=4 rejection rate {rate:.4}");
    assert!(rate < 0.05, "rate {rate}");
    assert_eq!(hist.values().sum::<usize>(), samples);
}

#[test]
fn screening_agrees_with_order() {
    let mut prng = DetPrng::new(12);
    for _ in 0..200 {
        let k = BoolMatrix::random_invertible(&mut prng, 5, 256).unwrap().matrix;
        let Ok(Order::Exact(o)) = element_order(&k, 0) else { panic!() };
        assert_eq!(screen_key(&k, 20).unwrap().accepted(), o > 20);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn order_is_minimal_and_divides_group(n in 1usize..=6, seed: u64) {
        let mut prng = DetPrng::new(seed);
        let k = BoolMatrix::random_invertible(&mut prng, n, 256).unwrap().matrix;
        let Order::Exact(o) = element_order(&k, u64::MAX).unwrap() else {
            return Err(TestCaseError::fail("exact order expected"));
        };
        let naive = unpack(&k);
        let mut power = naive.clone();
        for e in 1..o {
            prop_assert_ne!(&power, &naive_identity(n), "K^{} = I below order {}", e, o);
            power = naive_mul(&power, &naive);
        }
        prop_assert_eq!(power, naive_identity(n));
        prop_assert_eq!(group_order(n) % BigUint::from(o), BigUint::from(0u32));
    }

    #[test]
    fn iterated_order_matches_exact_order(n in 17usize..=24, seed: u64) {
        // Permutation matrices have small known orders past the exact range.
        let mut prng = DetPrng::new(seed);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, (prng.next_u64() % (i as u64 + 1)) as usize);
        }
        let k = BoolMatrix::from_fn(n, |i, j| perm[i] == j);
        let mut cycle_lcm = 1u64;
        let mut seen = vec![false; n];
        for start in 0..n {
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = perm[x];
                len += 1;
            }
            if len > 0 {
                cycle_lcm = lcm(cycle_lcm, len);
            }
        }
        prop_assert_eq!(element_order(&k, 1 << 20).unwrap(), Order::Exact(cycle_lcm));
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use feam_core::attacks::{run_cca, run_cpa, AttackConfig, VPath};
use feam_core::campaign::{run_campaign, CampaignConfig, TrialReport};
use feam_core::feam::{distribute, keygen_session, recover, CipherState, Direction, MasterKey, SessionSecrets};
use feam_core::keyspace::{element_order, group_order, Order};
use feam_core::linalg::{LinearSystem, Solution};
use feam_core::oracle::{Oracle, OracleConfig, OracleMode};
use feam_core::attacks::AttackKind;
use feam_core::{BoolMatrix, DetPrng};
use num_bigint::BigUint;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cipher_roundtrip() -> Outcome {
    let start = Instant::now();
    let mut prng = DetPrng::new(0xC0FFEE);
    let mut cases = 0;
    let mut mismatches = 0;
    for n in [2, 4, 8, 16, 64] {
        for _ in 0..40 {
            let s = keygen_session(&mut prng, n).unwrap();
            let mut enc = CipherState::new(&s, Direction::Encrypt);
            let mut dec = CipherState::new(&s, Direction::Decrypt);
            for _ in 0..4 {
                let p = BoolMatrix::random(&mut prng, n);
                let c = enc.encrypt_block(&p).unwrap();
                mismatches += (dec.decrypt_block(&c).unwrap() != p) as usize;
            }
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        cases >= 200 && mismatches == 0 && elapsed < Duration::from_secs(10),
        format!("{cases} cases, {mismatches} mismatches, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn distribution_roundtrip() -> Outcome {
    let mut prng = DetPrng::new(0xD15);
    let mut bad = 0;
    let pairs = 100;
    for t in 0..pairs {
        let n = 1 + t % 16;
        let master = MasterKey::generate(&mut prng, n).unwrap();
        let s = keygen_session(&mut prng, n).unwrap();
        let got = recover(&master, &distribute(&master, &s).unwrap()).unwrap();
        let k_inv = pack(&naive_inverse(&unpack(s.key())).unwrap());
        bad += (got.key_inverse() != &k_inv || got.initial() != s.initial()) as usize;
    }
    outcome(bad == 0, format!("{pairs} pairs at n<=16, {bad} mismatches"))
}

fn differential_identity() -> Outcome {
    let n = 8;
    let mut prng = DetPrng::new(0xD1FF);
    let mut bad = 0;
    let mut blocks = 0;
    for _ in 0..50 {
        let s = keygen_session(&mut prng, n).unwrap();
        let k = unpack(s.key());
        let mut a = CipherState::new(&s, Direction::Encrypt);
        let mut b = CipherState::new(&s, Direction::Encrypt);
        for i in 1..=20u64 {
            let p1 = BoolMatrix::random(&mut prng, n);
            let p2 = BoolMatrix::random(&mut prng, n);
            let dc = &a.encrypt_block(&p1).unwrap() + &b.encrypt_block(&p2).unwrap();
            let expect = naive_mul(&naive_mul(&k, &unpack(&(&p1 + &p2))), &naive_pow(&k, n as u64 + i));
            bad += (unpack(&dc) != expect) as usize;
            blocks += 1;
        }
    }
    outcome(blocks >= 1000 && bad == 0, format!("{blocks} paired blocks at n=8, {bad} mismatches"))
}

struct CampaignRun {
    reports: Vec<TrialReport>,
    slowest: Duration,
}

fn campaign(kind: AttackKind, mode: OracleMode, n: usize, trials: usize, seed: u64) -> CampaignRun {
    let cfg = CampaignConfig {
        kind,
        mode,
        n,
        trials,
        seed,
        max_extra_records: 4,
    };
    let mut reports = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut last = Instant::now();
    run_campaign(&cfg, |r| {
        slowest = slowest.max(last.elapsed());
        reports.push(r.clone());
        last = Instant::now();
    })
    .unwrap();
    CampaignRun { reports, slowest }
}

fn key_recovery(n8: &CampaignRun, n64: &CampaignRun) -> Outcome {
    let ok8 = n8.reports.iter().filter(|r| r.k_matches()).count();
    let ok64 = n64.reports.iter().filter(|r| r.k_matches()).count();
    let pass = ok8 == n8.reports.len()
        && n8.reports.len() >= 1000
        && ok64 == n64.reports.len()
        && n64.reports.len() >= 20
        && n64.slowest < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "n=8 {ok8}/{}, n=64 {ok64}/{} (slowest trial {:.3}s)",
            n8.reports.len(),
            n64.reports.len(),
            n64.slowest.as_secs_f64()
        ),
    )
}

fn chosen_bits(n8: &CampaignRun, n64: &CampaignRun) -> Outcome {
    let minimal = |run: &CampaignRun, n: u64| {
        let direct: Vec<_> = run
            .reports
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok())
            .filter(|t| t.v_path == VPath::Direct)
            .collect();
        let exact = direct.iter().all(|t| t.chosen_bits == 4 * n * n);
        (direct.len(), exact, direct.first().map(|t| t.chosen_bytes()))
    };
    let (c8, e8, _) = minimal(n8, 8);
    let (c64, e64, bytes64) = minimal(n64, 64);
    outcome(
        c8 > 0 && e8 && c64 > 0 && e64 && bytes64 == Some(2048),
        format!("{c8} minimal transcripts at n=8 with 256 bits: {e8}, {c64} at n=64 with 2048 bytes: {}", e64 && bytes64 == Some(2048)),
    )
}

/// Largest `V`-path Failed rate regarded as near zero.
const NEAR_ZERO_FAILED_RATE: f64 = 0.05;

fn v_recovery(n8: &CampaignRun) -> Outcome {
    let mut resolved = 0;
    let mut resolved_ok = 0;
    let mut failed = 0;
    let mut failed_with_fixed_vector = 0;
    for r in &n8.reports {
        let Ok(t) = &r.outcome else { continue };
        if t.v_path == VPath::Failed {
            failed += 1;
            let i_plus_k = &BoolMatrix::identity(8) + r.planted.key();
            failed_with_fixed_vector += (!i_plus_k.is_invertible()) as usize;
        } else {
            resolved += 1;
            resolved_ok += (t.verified && r.v_matches() == Some(true)) as usize;
        }
    }
    let rate = failed as f64 / n8.reports.len() as f64;
    outcome(
        resolved_ok == resolved && rate <= NEAR_ZERO_FAILED_RATE,
        format!(
            "resolved {resolved_ok}/{resolved} correct and re-encrypting, failed rate {rate:.3} \
             (limit {NEAR_ZERO_FAILED_RATE}); {failed_with_fixed_vector}/{failed} failed trials have singular I+K"
        ),
    )
}

fn cca_parity() -> Outcome {
    let trials = 100;
    let mut same = 0u64;
    for t in 0..trials {
        let mut prng = DetPrng::new(0xCCA0 + t);
        let master = MasterKey::generate(&mut prng, 8).unwrap();
        let tamper = prng.next_u64();
        let cfg = AttackConfig {
            plan_seed: prng.next_u64(),
            ..AttackConfig::default()
        };
        let mut a = Oracle::new(OracleConfig::new(OracleMode::Insecure, master.clone()));
        let mut b = Oracle::new(OracleConfig::new(OracleMode::Insecure, master));
        let cpa = run_cpa(&mut a, Some(tamper), &cfg).unwrap();
        let cca = run_cca(&mut b, Some(tamper), &cfg).unwrap();
        let planted = a.session(1).unwrap().planted_secrets();
        assert_eq!(planted, b.session(1).unwrap().planted_secrets());
        same += (cpa.recovered_k == cca.recovered_k && &cca.recovered_k == planted.key()) as u64;
    }
    outcome(same == trials, format!("{same}/{trials} trials agree on K at n=8"))
}

fn negative_control() -> Outcome {
    let run = campaign(AttackKind::ChosenPlaintext, OracleMode::Secure, 8, 100, 0x5EC);
    let verified = run.reports.iter().filter(|r| r.outcome.is_ok()).count();
    outcome(verified == 0, format!("{verified}/100 verified recoveries"))
}

fn keyspace() -> Outcome {
    let mut problems = Vec::new();
    for n in 1..=4 {
        let count = (0u64..1 << (n * n))
            .filter(|bits| {
                let m = BoolMatrix::from_fn(n, |i, j| bits >> (i * n + j) & 1 == 1);
                naive_rank(&unpack(&m)) == n
            })
            .count();
        if group_order(n) != BigUint::from(count) {
            problems.push(format!("group order n={n}"));
        }
    }
    if group_order(2) != BigUint::from(6u32) || group_order(3) != BigUint::from(168u32) {
        problems.push("group order n=2,3".into());
    }
    let mut prng = DetPrng::new(0x1D);
    for n in [1, 8, 64] {
        if element_order(&BoolMatrix::identity(n), 1).unwrap() != Order::Exact(1) {
            problems.push(format!("order of I at n={n}"));
        }
        let s = SessionSecrets::new(BoolMatrix::identity(n), BoolMatrix::random(&mut prng, n)).unwrap();
        let mut st = CipherState::new(&s, Direction::Encrypt);
        for _ in 0..8 {
            let p = BoolMatrix::random(&mut prng, n);
            if st.encrypt_block(&p).unwrap() != p {
                problems.push(format!("identity key at n={n}"));
            }
        }
    }
    for t in 0..500 {
        let n = 1 + t % 12;
        let k = BoolMatrix::random_invertible(&mut prng, n, 256).unwrap().matrix;
        let Order::Exact(o) = element_order(&k, 0).unwrap() else {
            problems.push(format!("inexact order at n={n}"));
            continue;
        };
        if group_order(n) % BigUint::from(o) != BigUint::from(0u32) {
            problems.push(format!("order {o} at n={n}"));
        }
    }
    let detail = if problems.is_empty() {
        "group orders n=1..4, identity key, 500 orders divide |GL(n,2)|".to_string()
    } else {
        problems.join(", ")
    };
    outcome(problems.is_empty(), detail)
}

fn algebra_oracle() -> Outcome {
    let mut prng = DetPrng::new(0xA16);
    let instances = 1000;
    let mut bad = 0;
    for t in 0..instances {
        let n = 1 + t % 8;
        let a = BoolMatrix::random(&mut prng, n);
        let b = BoolMatrix::random(&mut prng, n);
        bad += (unpack(&(&a * &b)) != naive_mul(&unpack(&a), &unpack(&b))) as usize;
        bad += (a.inverse().ok().map(|m| unpack(&m)) != naive_inverse(&unpack(&a))) as usize;
        let rhs: Vec<u8> = (0..n).map(|_| prng.next_u64() as u8 & 1).collect();
        let got = match LinearSystem::from_parts(&a, &to_bitvec(&rhs)).unwrap().solve() {
            Solution::Unique(x) => NaiveSolution::Unique(from_bitvec(&x)),
            Solution::Underdetermined { .. } => NaiveSolution::Underdetermined,
            Solution::Inconsistent => NaiveSolution::Inconsistent,
        };
        bad += (got != naive_solve(&unpack(&a), &rhs)) as usize;
    }
    outcome(bad == 0, format!("{instances} instances of mul/inverse/solve at n<=8, {bad} mismatches"))
}

fn prng_sequence() -> Outcome {
    const EXPECTED: [u64; 10] = [
        0xe220a8397b1dcdaf,
        0x6e789e6aa1b965f4,
        0x06c45d188009454f,
        0xf88bb8a8724c81ec,
        0x1b39896a51a8749b,
        0x53cb9f0c747ea2ea,
        0x2c829abe1f4532e1,
        0xc584133ac916ab3c,
        0x3ee5789041c98ac3,
        0xf3b8488c368cb0a6,
    ];
    let got: Vec<u64> = DetPrng::new(0).take(10).collect();
    outcome(got == EXPECTED, "seed 0, first 10 outputs")
}

fn main() -> ExitCode {
    let n8 = campaign(AttackKind::ChosenPlaintext, OracleMode::Insecure, 8, 1000, 0x8);
    let n64 = campaign(AttackKind::ChosenPlaintext, OracleMode::Insecure, 64, 20, 0x40);

    let results = [
        ("cipher correctness", cipher_roundtrip()),
        ("key distribution roundtrip", distribution_roundtrip()),
        ("differential identity", differential_identity()),
        ("attack key recovery", key_recovery(&n8, &n64)),
        ("chosen-bit count", chosen_bits(&n8, &n64)),
        ("V recovery", v_recovery(&n8)),
        ("CCA parity", cca_parity()),
        ("negative control", negative_control()),
        ("keyspace", keyspace()),
        ("algebra oracle equivalence", algebra_oracle()),
        ("PRNG bit-exactness", prng_sequence()),
    ];
    let mut failures = 0;
    for (name, r) in &results {
        println!("{} {name}: {}", if r.pass { "PASS" } else { "FAIL" }, r.detail);
        failures += (!r.pass) as usize;
    }
    println!("{} of {} criteria passed", results.len() - failures, results.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

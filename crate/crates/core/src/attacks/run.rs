use std::fmt::Write as _;

use super::plan::make_plan;
use super::recover::{
    recover_session_key, recover_session_key_cca, recover_v_direct, BlockRecord, DirectRecovery,
    SylvesterRecovery, SylvesterSolver,
};
use crate::error::{Error, Result};
use crate::feam::{CipherState, Direction, SessionSecrets};
use crate::linalg::BoolMatrix;
use crate::oracle::{Oracle, SessionId};
use crate::prng::DetPrng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackKind {
    ChosenPlaintext,
    ChosenCiphertext,
}

impl AttackKind {
    fn direction(self) -> Direction {
        match self {
            AttackKind::ChosenPlaintext => Direction::Encrypt,
            AttackKind::ChosenCiphertext => Direction::Decrypt,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AttackKind::ChosenPlaintext => "cpa",
            AttackKind::ChosenCiphertext => "cca",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VPath {
    Direct,
    Fallback,
    Failed,
}

impl VPath {
    pub fn name(self) -> &'static str {
        match self {
            VPath::Direct => "direct",
            VPath::Fallback => "fallback",
            VPath::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackConfig {
    /// Index `i` of the first differential block; blocks before it are
    /// submitted as zero matrices.
    pub index: u64,
    /// Extra block pairs to submit when the stacked per-block equations
    /// leave `V` underdetermined.
    pub max_extra_records: usize,
    /// Seed of the attacker's own generator (chosen blocks).
    pub plan_seed: u64,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            index: 1,
            max_extra_records: 4,
            plan_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    /// 1 or 2: which of the two attacked sessions.
    pub session: u8,
    pub index: u64,
    /// What the attacker submitted.
    pub input: BoolMatrix,
    /// What the oracle returned.
    pub output: BoolMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackTranscript {
    pub kind: AttackKind,
    pub n: usize,
    pub index: u64,
    pub entries: Vec<TranscriptEntry>,
    pub recovered_k: BoolMatrix,
    pub recovered_v: Option<BoolMatrix>,
    pub v_path: VPath,
    pub chosen_bits: u64,
    pub sessions_used: u32,
    pub verified: bool,
}

impl AttackTranscript {
    pub fn chosen_bytes(&self) -> u64 {
        self.chosen_bits / 8
    }

    /// `key=value` lines with hex-encoded matrices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(w, "attack={}", self.kind.name()).unwrap();
        writeln!(w, "n={}", self.n).unwrap();
        writeln!(w, "index={}", self.index).unwrap();
        writeln!(w, "sessions_used={}", self.sessions_used).unwrap();
        writeln!(w, "chosen_bits={}", self.chosen_bits).unwrap();
        writeln!(w, "chosen_bytes={}", self.chosen_bytes()).unwrap();
        writeln!(w, "v_path={}", self.v_path.name()).unwrap();
        writeln!(w, "verified={}", self.verified).unwrap();
        writeln!(w, "recovered_k={}", self.recovered_k.to_hex()).unwrap();
        match &self.recovered_v {
            Some(v) => writeln!(w, "recovered_v={}", v.to_hex()).unwrap(),
            None => writeln!(w, "recovered_v=unresolved").unwrap(),
        }
        for e in &self.entries {
            writeln!(
                w,
                "query=session:{} i:{} in:{} out:{}",
                e.session,
                e.index,
                e.input.to_hex(),
                e.output.to_hex()
            )
            .unwrap();
        }
        out
    }
}

/// Drives two sessions of one oracle in lockstep.
struct Harness<'a> {
    oracle: &'a mut Oracle,
    kind: AttackKind,
    sessions: [SessionId; 2],
    entries: Vec<TranscriptEntry>,
    chosen_bits: u64,
}

impl Harness<'_> {
    fn submit(&mut self, slot: usize, input: &BoolMatrix) -> Result<BoolMatrix> {
        let id = self.sessions[slot];
        let index = self.oracle.session(id)?.transcript().len() as u64 + 1;
        let output = match self.kind {
            AttackKind::ChosenPlaintext => self.oracle.query_encrypt(id, input)?,
            AttackKind::ChosenCiphertext => self.oracle.query_decrypt(id, input)?,
        };
        let n = input.n() as u64;
        self.chosen_bits += n * n;
        self.entries.push(TranscriptEntry {
            session: slot as u8 + 1,
            index,
            input: input.clone(),
            output: output.clone(),
        });
        Ok(output)
    }

    /// Submits `a` to session 1 and `b` to session 2, returning
    /// `(record of session 1, input differential, output differential)`.
    fn submit_pair(&mut self, a: &BoolMatrix, b: &BoolMatrix) -> Result<(BlockRecord, BoolMatrix, BoolMatrix)> {
        let index = self.oracle.session(self.sessions[0])?.transcript().len() as u64 + 1;
        let out_a = self.submit(0, a)?;
        let out_b = self.submit(1, b)?;
        let d_in = a + b;
        let d_out = &out_a + &out_b;
        let record = match self.kind {
            AttackKind::ChosenPlaintext => BlockRecord {
                index,
                plain: a.clone(),
                cipher: out_a,
            },
            AttackKind::ChosenCiphertext => BlockRecord {
                index,
                plain: out_a,
                cipher: a.clone(),
            },
        };
        Ok((record, d_in, d_out))
    }
}

/// Differential chosen-plaintext attack against an oracle whose random
/// process can be forced to repeat.
///
/// Two encryption sessions are opened with the same `tamper_seed` (or, on a
/// resumable oracle, with none). Both receive blocks whose differential is
/// the same invertible `ΔP` at indices `i` and `i + 1`; the session key
/// falls out of the ciphertext differentials, and `V` from the block
/// equations of session 1. The recovered pair is verified against every
/// observed block.
pub fn run_cpa(oracle: &mut Oracle, tamper_seed: Option<u64>, cfg: &AttackConfig) -> Result<AttackTranscript> {
    run_attack(oracle, tamper_seed, cfg, AttackKind::ChosenPlaintext)
}

/// Chosen-ciphertext counterpart of [`run_cpa`] against a decryption
/// oracle: equal ciphertext differentials at `i` and `i + 1` give
/// `ΔP_{i+1} = ΔP_i·K⁻¹`.
pub fn run_cca(oracle: &mut Oracle, tamper_seed: Option<u64>, cfg: &AttackConfig) -> Result<AttackTranscript> {
    run_attack(oracle, tamper_seed, cfg, AttackKind::ChosenCiphertext)
}

fn run_attack(
    oracle: &mut Oracle,
    tamper_seed: Option<u64>,
    cfg: &AttackConfig,
    kind: AttackKind,
) -> Result<AttackTranscript> {
    let n = oracle.n();
    let mut prng = DetPrng::new(cfg.plan_seed);
    let plan = make_plan(&mut prng, n, cfg.index)?;

    let dir = kind.direction();
    let first = oracle.open_session(tamper_seed, dir)?;
    let second = oracle.open_session(tamper_seed, dir)?;
    let mut h = Harness {
        oracle,
        kind,
        sessions: [first, second],
        entries: Vec::new(),
        chosen_bits: 0,
    };

    let zero = BoolMatrix::zero(n);
    for _ in 1..plan.index {
        h.submit_pair(&zero, &zero)?;
    }
    let (rec_i, _, d_out_i) = h.submit_pair(&plan.first[0], &plan.second[0])?;
    let (rec_next, _, d_out_next) = h.submit_pair(&plan.first[1], &plan.second[1])?;

    // A singular differential cannot occur when both sessions share (K, V).
    let k = match kind {
        AttackKind::ChosenPlaintext => recover_session_key(&d_out_i, &d_out_next),
        AttackKind::ChosenCiphertext => recover_session_key_cca(&d_out_i, &d_out_next),
    };
    let k = match k {
        Ok(k) if k.is_invertible() => k,
        _ => return Err(Error::VerificationFailed),
    };
    let k_inv = k.inverse()?;

    let (v, v_path) = match recover_v_direct(&k, &rec_i, &rec_next)? {
        DirectRecovery::Recovered(v) => (Some(v), VPath::Direct),
        DirectRecovery::Singular => {
            let mut solver = SylvesterSolver::new(&k)?;
            solver.push(&rec_i)?;
            solver.push(&rec_next)?;
            let mut extra = 0;
            loop {
                match solver.solution() {
                    SylvesterRecovery::Unique(v) => break (Some(v), VPath::Fallback),
                    SylvesterRecovery::Inconsistent => return Err(Error::VerificationFailed),
                    SylvesterRecovery::Underdetermined { .. } if extra == cfg.max_extra_records => {
                        break (None, VPath::Failed)
                    }
                    SylvesterRecovery::Underdetermined { .. } => {
                        let a = BoolMatrix::random(&mut prng, n);
                        let b = &a + &plan.delta;
                        let (rec, _, _) = h.submit_pair(&a, &b)?;
                        solver.push(&rec)?;
                        extra += 1;
                    }
                }
            }
        }
    };

    verify(&h.entries, &k, &k_inv, v.as_ref(), kind)?;

    Ok(AttackTranscript {
        kind,
        n,
        index: plan.index,
        recovered_k: k,
        recovered_v: v,
        v_path,
        chosen_bits: h.chosen_bits,
        sessions_used: 2,
        verified: true,
        entries: h.entries,
    })
}

type Side = fn(&TranscriptEntry) -> &BoolMatrix;

/// Checks `ΔC_t = K·ΔP_t·K^(n+t)` at every index, and when `V` is known,
/// that re-running each session with `(K, V)` reproduces the observed
/// blocks exactly.
fn verify(
    entries: &[TranscriptEntry],
    k: &BoolMatrix,
    k_inv: &BoolMatrix,
    v: Option<&BoolMatrix>,
    kind: AttackKind,
) -> Result<()> {
    let n = k.n() as u64;
    let (plain, cipher): (Side, Side) = match kind {
        AttackKind::ChosenPlaintext => (|e| &e.input, |e| &e.output),
        AttackKind::ChosenCiphertext => (|e| &e.output, |e| &e.input),
    };
    let by_session = |s: u8| entries.iter().filter(move |e| e.session == s);
    for (a, b) in by_session(1).zip(by_session(2)) {
        debug_assert_eq!(a.index, b.index);
        let d_plain = plain(a) + plain(b);
        let d_cipher = cipher(a) + cipher(b);
        if d_cipher != &(k * &d_plain) * &k.pow(n + a.index) {
            return Err(Error::VerificationFailed);
        }
    }
    if let Some(v) = v {
        let secrets = SessionSecrets::new(k.clone(), v.clone())?;
        debug_assert_eq!(secrets.key_inverse(), k_inv);
        for s in [1, 2] {
            let mut st = CipherState::new(&secrets, Direction::Encrypt);
            for e in by_session(s) {
                if &st.encrypt_block(plain(e))? != cipher(e) {
                    return Err(Error::VerificationFailed);
                }
            }
        }
    }
    Ok(())
}

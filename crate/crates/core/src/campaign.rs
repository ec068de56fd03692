//! Repeated attack trials against fresh oracles, scored against the
//! secrets each oracle actually planted.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::attacks::{run_cca, run_cpa, AttackConfig, AttackKind, AttackTranscript, VPath};
use crate::error::{Error, Result};
use crate::feam::{MasterKey, SessionSecrets};
use crate::oracle::{Oracle, OracleConfig, OracleMode};
use crate::prng::DetPrng;

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub kind: AttackKind,
    pub mode: OracleMode,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_extra_records: usize,
}

#[derive(Debug, Clone)]
pub struct TrialReport {
    pub trial: usize,
    pub tamper_seed: Option<u64>,
    pub planted: SessionSecrets,
    pub outcome: std::result::Result<AttackTranscript, Error>,
}

impl TrialReport {
    pub fn k_matches(&self) -> bool {
        matches!(&self.outcome, Ok(t) if &t.recovered_k == self.planted.key())
    }

    /// `None` when the attack did not produce a `V`.
    pub fn v_matches(&self) -> Option<bool> {
        match &self.outcome {
            Ok(t) => t.recovered_v.as_ref().map(|v| v == self.planted.initial()),
            Err(_) => None,
        }
    }

    /// A verified transcript whose `K` (and `V`, when resolved) differ from
    /// the planted secrets. Against an oracle that reuses secrets, a failed
    /// attack is a violation as well.
    pub fn is_violation(&self, mode: OracleMode) -> bool {
        match &self.outcome {
            Ok(_) => !self.k_matches() || self.v_matches() == Some(false),
            Err(_) => mode != OracleMode::Secure,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "trial={}", self.trial).unwrap();
        match self.tamper_seed {
            Some(s) => writeln!(out, "tamper_seed={s}").unwrap(),
            None => writeln!(out, "tamper_seed=none").unwrap(),
        }
        match &self.outcome {
            Ok(t) => {
                out.push_str(&t.to_text());
                writeln!(out, "k_matches_planted={}", self.k_matches()).unwrap();
                if let Some(ok) = self.v_matches() {
                    writeln!(out, "v_matches_planted={ok}").unwrap();
                }
            }
            Err(e) => writeln!(out, "error={}", e.kind()).unwrap(),
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CampaignSummary {
    pub trials: usize,
    /// Trials that returned a verified transcript.
    pub verified: usize,
    pub k_correct: usize,
    pub v_correct: usize,
    pub v_paths: BTreeMap<VPath, usize>,
    pub errors: BTreeMap<&'static str, usize>,
    pub violations: usize,
    pub chosen_bits_total: u64,
    pub chosen_bits_direct_total: u64,
}

impl CampaignSummary {
    pub fn path_count(&self, p: VPath) -> usize {
        self.v_paths.get(&p).copied().unwrap_or(0)
    }

    pub fn success_rate(&self) -> f64 {
        ratio(self.k_correct, self.trials)
    }

    pub fn failed_rate(&self) -> f64 {
        ratio(self.path_count(VPath::Failed), self.verified)
    }

    pub fn mean_chosen_bits(&self) -> f64 {
        ratio_u64(self.chosen_bits_total, self.verified)
    }

    pub fn mean_chosen_bits_direct(&self) -> f64 {
        ratio_u64(self.chosen_bits_direct_total, self.path_count(VPath::Direct))
    }

    pub fn to_text(&self, cfg: &CampaignConfig) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(w, "attack={}", cfg.kind.name()).unwrap();
        writeln!(w, "oracle={}", cfg.mode).unwrap();
        writeln!(w, "n={}", cfg.n).unwrap();
        writeln!(w, "trials={}", self.trials).unwrap();
        writeln!(w, "verified={}", self.verified).unwrap();
        writeln!(w, "k_correct={}", self.k_correct).unwrap();
        writeln!(w, "v_correct={}", self.v_correct).unwrap();
        writeln!(w, "success_rate={:.4}", self.success_rate()).unwrap();
        for p in [VPath::Direct, VPath::Fallback, VPath::Failed] {
            writeln!(w, "v_path_{}={}", p.name(), self.path_count(p)).unwrap();
        }
        writeln!(w, "v_failed_rate={:.4}", self.failed_rate()).unwrap();
        writeln!(w, "mean_chosen_bits={:.1}", self.mean_chosen_bits()).unwrap();
        writeln!(w, "mean_chosen_bits_direct={:.1}", self.mean_chosen_bits_direct()).unwrap();
        for (kind, count) in &self.errors {
            writeln!(w, "error_{kind}={count}").unwrap();
        }
        writeln!(w, "violations={}", self.violations).unwrap();
        out
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn ratio_u64(a: u64, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Runs `cfg.trials` attacks, each against a fresh oracle, calling
/// `on_trial` after every trial. Trial `t` is fully determined by
/// `cfg.seed` except in secure mode.
pub fn run_campaign(cfg: &CampaignConfig, mut on_trial: impl FnMut(&TrialReport)) -> Result<CampaignSummary> {
    let mut seeds = DetPrng::new(cfg.seed);
    let mut summary = CampaignSummary::default();
    for trial in 0..cfg.trials {
        let mut trial_prng = seeds.fork();
        let master = MasterKey::generate(&mut trial_prng, cfg.n)?;
        let tamper = trial_prng.next_u64();
        let attack = AttackConfig {
            plan_seed: trial_prng.next_u64(),
            max_extra_records: cfg.max_extra_records,
            ..AttackConfig::default()
        };
        let tamper_seed = (cfg.mode == OracleMode::Insecure).then_some(tamper);

        let mut oracle = Oracle::new(OracleConfig::new(cfg.mode, master));
        let outcome = match cfg.kind {
            AttackKind::ChosenPlaintext => run_cpa(&mut oracle, tamper_seed, &attack),
            AttackKind::ChosenCiphertext => run_cca(&mut oracle, tamper_seed, &attack),
        };
        // The attacked sessions are the first two the oracle opened.
        let planted = oracle.session(1)?.planted_secrets().clone();
        let report = TrialReport {
            trial,
            tamper_seed,
            planted,
            outcome,
        };

        summary.trials += 1;
        match &report.outcome {
            Ok(t) => {
                summary.verified += 1;
                *summary.v_paths.entry(t.v_path).or_default() += 1;
                summary.chosen_bits_total += t.chosen_bits;
                if t.v_path == VPath::Direct {
                    summary.chosen_bits_direct_total += t.chosen_bits;
                }
            }
            Err(e) => *summary.errors.entry(e.kind()).or_default() += 1,
        }
        summary.k_correct += report.k_matches() as usize;
        summary.v_correct += (report.v_matches() == Some(true)) as usize;
        summary.violations += report.is_violation(cfg.mode) as usize;
        on_trial(&report);
    }
    Ok(summary)
}

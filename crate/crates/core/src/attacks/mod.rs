//! Differential chosen-plaintext and chosen-ciphertext key recovery.
//!
//! Two sessions that share `(K, V)` turn the cipher into a linear map on
//! differentials: `ΔC_i = K·ΔP_i·K^(n+i)`. Keeping `ΔP` fixed across two
//! consecutive indices gives `ΔC_{i+1} = ΔC_i·K`, which reveals `K`
//! directly; `V` then satisfies a linear matrix equation per block.

mod plan;
mod recover;
mod run;

pub use plan::{make_plan, ChosenPlaintextPlan, DifferentialPlan};
pub use recover::{
    block_equation_rhs, recover_session_key, recover_session_key_cca, recover_v_direct, recover_v_sylvester,
    BlockRecord, DirectRecovery, SylvesterRecovery, SylvesterSolver,
};
pub use run::{run_cca, run_cpa, AttackConfig, AttackKind, AttackTranscript, TranscriptEntry, VPath};

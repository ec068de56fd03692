use crate::error::{Error, Result};
use crate::linalg::{BoolMatrix, Echelon, LinearSystem, Solution};

/// One processed block of a session: index, plaintext, ciphertext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockRecord {
    pub index: u64,
    pub plain: BoolMatrix,
    pub cipher: BoolMatrix,
}

/// `K = (ΔC_i)⁻¹·ΔC_{i+1}` from the ciphertext differentials of two sessions
/// that share `(K, V)` and whose plaintext differentials at `i` and `i + 1`
/// are equal and invertible.
pub fn recover_session_key(dc_i: &BoolMatrix, dc_next: &BoolMatrix) -> Result<BoolMatrix> {
    let inv = dc_i.inverse()?;
    inv.checked_mul(dc_next)
}

/// Chosen-ciphertext dual: with `ΔC_{i+1} = ΔC_i`, the plaintext
/// differentials satisfy `ΔP_{i+1} = ΔP_i·K⁻¹`, so
/// `K = ((ΔP_i)⁻¹·ΔP_{i+1})⁻¹ = (ΔP_{i+1})⁻¹·ΔP_i`.
pub fn recover_session_key_cca(dp_i: &BoolMatrix, dp_next: &BoolMatrix) -> Result<BoolMatrix> {
    let k_inv = dp_i.inverse()?.checked_mul(dp_next)?;
    k_inv.inverse()
}

/// Right-hand side of the per-block equation in `V`:
/// `V·K^(n+i) + K⁻¹·V = K⁻²·(C_i + K·P_i·K^(n+i))·K^-i`.
pub fn block_equation_rhs(k: &BoolMatrix, k_inv: &BoolMatrix, r: &BlockRecord) -> Result<BoolMatrix> {
    let n = k.n() as u64;
    let masked = r.cipher.checked_add(&(&(k * &r.plain) * &k.pow(n + r.index)))?;
    let k_inv2 = k_inv * k_inv;
    Ok(&(&k_inv2 * &masked) * &k_inv.pow(r.index))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DirectRecovery {
    Recovered(BoolMatrix),
    /// `I + K^(j-i)` is singular, e.g. always when `K = I`.
    Singular,
}

/// Adds the block equations of two records of one session:
/// `V·K^(n+i)·(I + K^(j-i)) = R_i + R_j`, then multiplies through by
/// `(I + K^(j-i))⁻¹·K^-(n+i)`.
pub fn recover_v_direct(k: &BoolMatrix, a: &BlockRecord, b: &BlockRecord) -> Result<DirectRecovery> {
    let (a, b) = if a.index <= b.index { (a, b) } else { (b, a) };
    let k_inv = k.inverse()?;
    let n = k.n();
    let gap = b.index - a.index;
    let Ok(g_inv) = (&BoolMatrix::identity(n) + &k.pow(gap)).inverse() else {
        return Ok(DirectRecovery::Singular);
    };
    let sum = &block_equation_rhs(k, &k_inv, a)? + &block_equation_rhs(k, &k_inv, b)?;
    let v = &(&sum * &g_inv) * &k_inv.pow(n as u64 + a.index);
    Ok(DirectRecovery::Recovered(v))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SylvesterRecovery {
    Unique(BoolMatrix),
    Underdetermined { rank: usize },
    /// The records contradict each other: they cannot come from one
    /// session keyed by `k`.
    Inconsistent,
}

/// Accumulates block equations as a linear system in the n² entries of
/// `vec_col(V)`.
///
/// Each record contributes the n² equations
/// `(kron((K^(n+i))ᵀ, I) + kron(I, K⁻¹))·vec_col(V) = vec_col(R_i)`.
#[derive(Debug, Clone)]
pub struct SylvesterSolver {
    k: BoolMatrix,
    k_inv: BoolMatrix,
    identity: BoolMatrix,
    left_term: BoolMatrix,
    echelon: Echelon,
    records: usize,
}

impl SylvesterSolver {
    /// Needs `n² ≤ MAX_DIM`, i.e. `n ≤ 64`.
    pub fn new(k: &BoolMatrix) -> Result<Self> {
        let n = k.n();
        let identity = BoolMatrix::identity(n);
        let k_inv = k.inverse()?;
        let left_term = identity.kron(&k_inv)?;
        Ok(SylvesterSolver {
            k: k.clone(),
            k_inv,
            identity,
            left_term,
            echelon: Echelon::new(n * n),
            records: 0,
        })
    }

    pub fn push(&mut self, r: &BlockRecord) -> Result<()> {
        let n = self.k.n();
        let power = self.k.pow(n as u64 + r.index);
        let coeff = &power.transpose().kron(&self.identity)? + &self.left_term;
        let rhs = block_equation_rhs(&self.k, &self.k_inv, r)?.vec_col();
        self.echelon.insert_system(&LinearSystem::from_parts(&coeff, &rhs)?)?;
        self.records += 1;
        Ok(())
    }

    pub fn records(&self) -> usize {
        self.records
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn solution(&self) -> SylvesterRecovery {
        match self.echelon.solution() {
            Solution::Unique(x) => SylvesterRecovery::Unique(
                BoolMatrix::from_vec_col(self.k.n(), &x).expect("n² unknowns"),
            ),
            Solution::Underdetermined { rank } => SylvesterRecovery::Underdetermined { rank },
            Solution::Inconsistent => SylvesterRecovery::Inconsistent,
        }
    }
}

/// Stacks the block equations of all `records` and solves for `V`.
pub fn recover_v_sylvester(k: &BoolMatrix, records: &[BlockRecord]) -> Result<SylvesterRecovery> {
    if records.is_empty() {
        return Err(Error::Format("at least one block record is needed".into()));
    }
    let mut solver = SylvesterSolver::new(k)?;
    for r in records {
        solver.push(r)?;
    }
    Ok(solver.solution())
}

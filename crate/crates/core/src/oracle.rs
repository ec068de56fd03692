//! Simulated encryption/decryption machines with a weak random process.
//!
//! Every session draws fresh `(K, V)` from a [`DetPrng`], wraps them under
//! the master key and unwraps them on the receiving side before any block
//! is processed. How the generator is seeded depends on the [`OracleMode`]:
//!
//! * `Insecure`: the seed comes from something the attacker can set (the
//!   system clock in the classic scenario), modelled as a caller-supplied
//!   tamper seed.
//! * `Secure`: fresh OS entropy per session; tamper seeds are refused.
//! * `Resumable`: the working stage restarts without redistributing keys,
//!   so every session after the first reuses the previous secrets.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::feam::{distribute, keygen_session, recover, CipherState, Direction, MasterKey, SessionSecrets};
use crate::linalg::BoolMatrix;
use crate::prng::DetPrng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleMode {
    Insecure,
    Secure,
    Resumable,
}

impl std::str::FromStr for OracleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "insecure" => Ok(OracleMode::Insecure),
            "secure" => Ok(OracleMode::Secure),
            "resumable" => Ok(OracleMode::Resumable),
            other => Err(format!("unknown oracle mode '{other}'")),
        }
    }
}

impl std::fmt::Display for OracleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OracleMode::Insecure => "insecure",
            OracleMode::Secure => "secure",
            OracleMode::Resumable => "resumable",
        })
    }
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub mode: OracleMode,
    pub master: MasterKey,
}

impl OracleConfig {
    pub fn new(mode: OracleMode, master: MasterKey) -> Self {
        OracleConfig { mode, master }
    }

    pub fn n(&self) -> usize {
        self.master.n()
    }
}

pub type SessionId = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRecord {
    pub index: u64,
    pub input: BoolMatrix,
    pub output: BoolMatrix,
}

#[derive(Debug, Clone)]
pub struct SessionHandle {
    id: SessionId,
    secrets: SessionSecrets,
    state: CipherState,
    transcript: Vec<QueryRecord>,
}

impl SessionHandle {
    pub fn id(&self) -> SessionId {
        self.id
    }

    pub fn direction(&self) -> Direction {
        self.state.direction()
    }

    pub fn transcript(&self) -> &[QueryRecord] {
        &self.transcript
    }

    /// Ground truth for test harnesses. Attacks never look at this.
    pub fn planted_secrets(&self) -> &SessionSecrets {
        &self.secrets
    }

    pub fn log_lines(&self) -> String {
        let dir = match self.direction() {
            Direction::Encrypt => 'e',
            Direction::Decrypt => 'd',
        };
        let mut out = String::new();
        for q in &self.transcript {
            writeln!(
                out,
                "session={} i={} dir={} in={} out={}",
                self.id,
                q.index,
                dir,
                q.input.to_hex(),
                q.output.to_hex()
            )
            .unwrap();
        }
        out
    }
}

/// A machine running the cryptosystem, holding its open sessions.
#[derive(Debug)]
pub struct Oracle {
    config: OracleConfig,
    sessions: HashMap<SessionId, SessionHandle>,
    last_secrets: Option<SessionSecrets>,
    next_id: SessionId,
}

impl Oracle {
    pub fn new(config: OracleConfig) -> Self {
        Oracle {
            config,
            sessions: HashMap::new(),
            last_secrets: None,
            next_id: 1,
        }
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n()
    }

    fn fresh_secrets(&self, tamper_seed: Option<u64>) -> Result<SessionSecrets> {
        let mut prng = match tamper_seed {
            Some(seed) => DetPrng::new(seed),
            None => DetPrng::from_entropy(),
        };
        keygen_session(&mut prng, self.n())
    }

    /// Starts a session. The sender's secrets travel through the key
    /// distribution step, and the receiver-side copy drives the cipher.
    pub fn open_session(&mut self, tamper_seed: Option<u64>, direction: Direction) -> Result<SessionId> {
        let sender = match (self.config.mode, &self.last_secrets) {
            (OracleMode::Secure, _) if tamper_seed.is_some() => return Err(Error::TamperRejected),
            (OracleMode::Resumable, Some(previous)) => previous.clone(),
            _ => self.fresh_secrets(tamper_seed)?,
        };
        let msg = distribute(&self.config.master, &sender)?;
        let secrets = recover(&self.config.master, &msg)?;
        debug_assert_eq!(secrets, sender);

        let id = self.next_id;
        self.next_id += 1;
        self.last_secrets = Some(secrets.clone());
        let state = CipherState::new(&secrets, direction);
        self.sessions.insert(
            id,
            SessionHandle {
                id,
                secrets,
                state,
                transcript: Vec::new(),
            },
        );
        Ok(id)
    }

    pub fn session(&self, id: SessionId) -> Result<&SessionHandle> {
        self.sessions.get(&id).ok_or(Error::UnknownSession(id))
    }

    fn query(&mut self, id: SessionId, input: &BoolMatrix, direction: Direction) -> Result<BoolMatrix> {
        let h = self.sessions.get_mut(&id).ok_or(Error::UnknownSession(id))?;
        let index = h.state.index();
        let output = match direction {
            Direction::Encrypt => h.state.encrypt_block(input)?,
            Direction::Decrypt => h.state.decrypt_block(input)?,
        };
        h.transcript.push(QueryRecord {
            index,
            input: input.clone(),
            output: output.clone(),
        });
        Ok(output)
    }

    pub fn query_encrypt(&mut self, id: SessionId, p: &BoolMatrix) -> Result<BoolMatrix> {
        self.query(id, p, Direction::Encrypt)
    }

    pub fn query_decrypt(&mut self, id: SessionId, c: &BoolMatrix) -> Result<BoolMatrix> {
        self.query(id, c, Direction::Decrypt)
    }

    pub fn close_session(&mut self, id: SessionId) -> Result<SessionHandle> {
        self.sessions.remove(&id).ok_or(Error::UnknownSession(id))
    }
}

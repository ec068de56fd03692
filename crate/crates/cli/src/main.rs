use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use feam_core::attacks::AttackKind;
use feam_core::campaign::{run_campaign, CampaignConfig};
use feam_core::feam::{
    decrypt_stream, encrypt_stream, frame_stream, keygen_session, unframe_stream, CipherState, Direction, MasterKey,
    SessionSecrets,
};
use feam_core::keyspace::{analyze_key, keygen_session_strict, DEFAULT_MIN_ORDER};
use feam_core::linalg::format::read_records;
use feam_core::oracle::OracleMode;
use feam_core::{BoolMatrix, DetPrng, Error};

#[derive(Parser, Debug)]
#[command(name = "feam", version, about = "Boolean-matrix block cipher and differential attack toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a session key file (K then V) or a master key file.
    Keygen(KeygenArgs),
    /// Encrypt a file under a session key file.
    Encrypt(CryptArgs),
    /// Decrypt a file produced by `encrypt`.
    Decrypt(CryptArgs),
    /// Differential chosen-plaintext campaign against a simulated oracle.
    AttackCpa(AttackArgs),
    /// Differential chosen-ciphertext campaign against a simulated oracle.
    AttackCca(AttackArgs),
    /// Report the order of a key and screen it against a threshold.
    AnalyzeKey(AnalyzeArgs),
    /// Encryption throughput in blocks per second.
    Bench(BenchArgs),
}

fn dimension(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    feam_core::linalg::check_dimension(n).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct KeygenArgs {
    #[arg(long, value_parser = dimension)]
    n: usize,
    /// Generator seed; fresh entropy when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Redraw K until its order exceeds --min-order.
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value_t = DEFAULT_MIN_ORDER)]
    min_order: u64,
    #[arg(long, default_value_t = 64)]
    max_attempts: u32,
    /// Write a single master key record instead of a session file.
    #[arg(long, conflicts_with = "strict")]
    master: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CryptArgs {
    #[arg(long)]
    key: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AttackArgs {
    #[arg(long, value_parser = dimension, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = OracleMode::Insecure)]
    oracle: OracleMode,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    max_extra_records: usize,
    /// Per-trial transcripts, separated by blank lines.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Matrix file; for a session file the first record (K) is analyzed.
    #[arg(long)]
    key: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MIN_ORDER)]
    min_order: u64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 2000)]
    blocks: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(PathBuf, io::Error),
    Violations(usize),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{}: {e}", e.kind()),
            Failure::Io(path, e) => write!(f, "Io: {}: {e}", path.display()),
            Failure::Violations(count) => write!(f, "{count} trial(s) violated attack invariants"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn prng(seed: Option<u64>) -> DetPrng {
    seed.map_or_else(DetPrng::from_entropy, DetPrng::new)
}

fn keygen(args: KeygenArgs) -> Result<(), Failure> {
    let mut prng = prng(args.seed);
    let bytes = if args.master {
        MasterKey::generate(&mut prng, args.n)?.matrix().to_bytes()
    } else if args.strict {
        keygen_session_strict(&mut prng, args.n, args.min_order, args.max_attempts)?.to_bytes()
    } else {
        keygen_session(&mut prng, args.n)?.to_bytes()
    };
    write(&args.out, &bytes)
}

fn load_session(path: &Path) -> Result<SessionSecrets, Failure> {
    Ok(SessionSecrets::from_bytes(&read(path)?)?)
}

fn encrypt(args: CryptArgs) -> Result<(), Failure> {
    let s = load_session(&args.key)?;
    if s.key().is_identity() {
        eprintln!("warning: weak key K = I (order 1); every ciphertext block equals its plaintext block");
    }
    let ct = encrypt_stream(&s, &read(&args.input)?);
    write(&args.out, &frame_stream(s.n(), &ct))
}

fn decrypt(args: CryptArgs) -> Result<(), Failure> {
    let s = load_session(&args.key)?;
    let framed = read(&args.input)?;
    let (n, ct) = unframe_stream(&framed)?;
    if n != s.n() {
        return Err(Error::DimensionMismatch { left: s.n(), right: n }.into());
    }
    write(&args.out, &decrypt_stream(&s, ct)?)
}

fn attack(kind: AttackKind, args: AttackArgs) -> Result<(), Failure> {
    let cfg = CampaignConfig {
        kind,
        mode: args.oracle,
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        max_extra_records: args.max_extra_records,
    };
    let mut report = String::new();
    let summary = run_campaign(&cfg, |trial| {
        if args.report.is_some() {
            report.push_str(&trial.to_text());
            report.push('\n');
        }
    })?;
    if let Some(path) = &args.report {
        write(path, report.as_bytes())?;
    }
    print!("{}", summary.to_text(&cfg));
    match summary.violations {
        0 => Ok(()),
        v => Err(Failure::Violations(v)),
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let records = read_records(&read(&args.key)?)?;
    let k = records
        .first()
        .ok_or_else(|| Error::Format("key file holds no matrix".into()))?;
    print!("{}", analyze_key(k, args.min_order)?.to_text());
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let mut prng = DetPrng::new(args.seed);
    let mut out = io::stdout().lock();
    for n in [16, 64, 128] {
        let s = keygen_session(&mut prng, n)?;
        let blocks: Vec<BoolMatrix> = (0..16).map(|_| BoolMatrix::random(&mut prng, n)).collect();
        let mut st = CipherState::new(&s, Direction::Encrypt);
        let start = Instant::now();
        for b in 0..args.blocks {
            st.encrypt_block(&blocks[b as usize % blocks.len()])?;
        }
        let secs = start.elapsed().as_secs_f64();
        let rate = args.blocks as f64 / secs.max(f64::MIN_POSITIVE);
        writeln!(out, "n={n} blocks={} seconds={secs:.4} blocks_per_sec={rate:.1}", args.blocks)
            .map_err(|e| Failure::Io("<stdout>".into(), e))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Keygen(a) => keygen(a),
        Command::Encrypt(a) => encrypt(a),
        Command::Decrypt(a) => decrypt(a),
        Command::AttackCpa(a) => attack(AttackKind::ChosenPlaintext, a),
        Command::AttackCca(a) => attack(AttackKind::ChosenCiphertext, a),
        Command::AnalyzeKey(a) => analyze(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

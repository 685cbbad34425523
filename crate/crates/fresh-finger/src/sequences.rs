//! Benchmark access-sequence generators and a plain-text sequence file
//! format.
//!
//! All randomized kinds draw from ChaCha8 seeded with the workload's 64-bit
//! seed, so a `(spec, seed)` pair produces the same sequence on every
//! platform. The file format is line oriented: a `"n m"` header, one key per
//! line, `#` comments anywhere.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::key::Key;

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("interleaved requires even n, got n={0}")]
    OddN(u64),
    #[error("interleaved requires n | m, got n={n} m={m}")]
    CycleMismatch { n: u64, m: u64 },
    #[error("strided requires 2K | n, got n={n} K={k}")]
    StrideMismatch { n: u64, k: u64 },
    #[error("strided requires n | mK, got n={n} m={m} K={k}")]
    StrideCycleMismatch { n: u64, m: u64, k: u64 },
    #[error("warmup-uniform requires r <= n, got r={r} n={n}")]
    WarmupRange { r: u64, n: u64 },
    #[error("warmup-uniform requires m >= 2 r log2 n, got m={m} need {need}")]
    WarmupLength { m: u64, need: u64 },
    #[error("n must be at least 2, got {0}")]
    TinyN(u64),
    #[error("m must be at least 1")]
    EmptySequence,
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header {0:?}: expected \"n m\"")]
    MalformedHeader(String),
    #[error("non-integer token {0:?} on line {1}")]
    BadToken(String, usize),
    #[error("key {key} on line {line} outside [1, {n}]")]
    KeyOutOfRange { key: u64, line: usize, n: u64 },
    #[error("header promised {expected} keys, file holds {actual}")]
    LengthMismatch { expected: u64, actual: u64 },
    #[error("file-backed specs are read with read_file, not generated")]
    FileKind,
}

/// Workload kinds. `Interleaved` and `Strided` are the two half-interleaved
/// sweeps; `WarmupUniform` touches `1..=r` once and then samples them
/// uniformly; `RoundRobin` is the cyclic sweep `1..=n` repeated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    Interleaved,
    Strided,
    WarmupUniform,
    Uniform,
    RoundRobin,
    File,
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SequenceKind::Interleaved => "interleaved",
            SequenceKind::Strided => "strided",
            SequenceKind::WarmupUniform => "warmup-uniform",
            SequenceKind::Uniform => "uniform",
            SequenceKind::RoundRobin => "round-robin",
            SequenceKind::File => "file",
        };
        f.write_str(s)
    }
}

/// Parameters of a workload. `k` is the stride (strided only), `r` the
/// warm-up prefix length (warmup-uniform only).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub n: u64,
    pub m: u64,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none", default)]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u64>,
    pub seed: u64,
    /// Source path for file-backed sequences.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<String>,
}

impl SequenceSpec {
    pub fn interleaved(n: u64, m: u64) -> Self {
        SequenceSpec {
            kind: SequenceKind::Interleaved,
            n,
            m,
            k: None,
            r: None,
            seed: 0,
            path: None,
        }
    }

    pub fn strided(n: u64, m: u64, k: u64) -> Self {
        SequenceSpec {
            kind: SequenceKind::Strided,
            n,
            m,
            k: Some(k),
            r: None,
            seed: 0,
            path: None,
        }
    }

    pub fn warmup_uniform(n: u64, m: u64, r: u64, seed: u64) -> Self {
        SequenceSpec {
            kind: SequenceKind::WarmupUniform,
            n,
            m,
            k: None,
            r: Some(r),
            seed,
            path: None,
        }
    }

    pub fn uniform(n: u64, m: u64, seed: u64) -> Self {
        SequenceSpec {
            kind: SequenceKind::Uniform,
            n,
            m,
            k: None,
            r: None,
            seed,
            path: None,
        }
    }

    pub fn round_robin(n: u64, m: u64) -> Self {
        SequenceSpec {
            kind: SequenceKind::RoundRobin,
            n,
            m,
            k: None,
            r: None,
            seed: 0,
            path: None,
        }
    }

    /// Spec for a sequence loaded from `path` (filled in by the harness).
    pub fn from_file(path: &Path, n: u64, m: u64) -> Self {
        SequenceSpec {
            kind: SequenceKind::File,
            n,
            m,
            k: None,
            r: None,
            seed: 0,
            path: Some(path.display().to_string()),
        }
    }
}

/// The advisory stride range for strided workloads; values outside it are
/// accepted with a warning on stderr.
pub fn stride_in_advisory_range(n: u64, k: u64) -> bool {
    let nf = n as f64;
    let kf = k as f64;
    kf >= nf.powf(0.25) && kf <= nf.sqrt()
}

/// Generates the access sequence for `spec`. Deterministic in `(spec, seed)`.
pub fn generate(spec: &SequenceSpec) -> Result<Vec<Key>, SequenceError> {
    if spec.n < 2 {
        return Err(SequenceError::TinyN(spec.n));
    }
    if spec.m == 0 {
        return Err(SequenceError::EmptySequence);
    }
    let (n, m) = (spec.n, spec.m);
    match spec.kind {
        SequenceKind::Interleaved => {
            if n % 2 != 0 {
                return Err(SequenceError::OddN(n));
            }
            if m % n != 0 {
                return Err(SequenceError::CycleMismatch { n, m });
            }
            let mut out = Vec::with_capacity(m as usize);
            for _ in 0..m / n {
                for j in 1..=n / 2 {
                    out.push(Key(j));
                    out.push(Key(n / 2 + j));
                }
            }
            Ok(out)
        }
        SequenceKind::Strided => {
            let k = spec.k.unwrap_or(1);
            if k == 0 || !n.is_multiple_of(2 * k) {
                return Err(SequenceError::StrideMismatch { n, k });
            }
            if !(m * k).is_multiple_of(n) {
                return Err(SequenceError::StrideCycleMismatch { n, m, k });
            }
            if !stride_in_advisory_range(n, k) {
                eprintln!(
                    "warning: stride K={k} outside the advisory range [n^(1/4), sqrt(n)] for n={n}"
                );
            }
            let cycle = n / k;
            if m % cycle != 0 {
                return Err(SequenceError::StrideCycleMismatch { n, m, k });
            }
            let mut out = Vec::with_capacity(m as usize);
            for _ in 0..m / cycle {
                for j in 1..=n / (2 * k) {
                    out.push(Key(j * k));
                    out.push(Key(n / 2 + j * k));
                }
            }
            Ok(out)
        }
        SequenceKind::WarmupUniform => {
            let r = spec.r.unwrap_or(n);
            if r > n || r == 0 {
                return Err(SequenceError::WarmupRange { r, n });
            }
            let need = (2.0 * r as f64 * (n as f64).log2()).ceil() as u64;
            if m < need {
                return Err(SequenceError::WarmupLength { m, need });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let mut out = Vec::with_capacity(m as usize);
            for j in 1..=r.min(m) {
                out.push(Key(j));
            }
            for _ in r..m {
                out.push(Key(rng.random_range(1..=r)));
            }
            Ok(out)
        }
        SequenceKind::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            Ok((0..m).map(|_| Key(rng.random_range(1..=n))).collect())
        }
        SequenceKind::RoundRobin => Ok((0..m).map(|i| Key(i % n + 1)).collect()),
        SequenceKind::File => Err(SequenceError::FileKind),
    }
}

/// Writes a sequence file: `"n m"` header, a comment recording the
/// generator, then one key per line.
pub fn write_file(
    path: &Path,
    n: u64,
    sequence: &[Key],
    provenance: Option<&SequenceSpec>,
) -> Result<(), SequenceError> {
    for (idx, key) in sequence.iter().enumerate() {
        if key.0 < 1 || key.0 > n {
            return Err(SequenceError::KeyOutOfRange {
                key: key.0,
                line: idx + 2,
                n,
            });
        }
    }
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", n, sequence.len()));
    match provenance {
        Some(spec) => {
            let mut line = format!("# kind={} seed={} prng=chacha8", spec.kind, spec.seed);
            if let Some(k) = spec.k {
                line.push_str(&format!(" K={k}"));
            }
            if let Some(r) = spec.r {
                line.push_str(&format!(" r={r}"));
            }
            out.push_str(&line);
            out.push('\n');
        }
        None => out.push_str("# prng=chacha8\n"),
    }
    for key in sequence {
        out.push_str(&format!("{}\n", key.0));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads a sequence file back as `(n, sequence)`.
pub fn read_file(path: &Path) -> Result<(u64, Vec<Key>), SequenceError> {
    let text = fs::read_to_string(path)?;
    let mut header: Option<(u64, u64)> = None;
    let mut keys = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match header {
            None => {
                let mut parts = line.split_whitespace();
                let (a, b) = (parts.next(), parts.next());
                match (a, b, parts.next()) {
                    (Some(a), Some(b), None) => {
                        let n = a
                            .parse::<u64>()
                            .map_err(|_| SequenceError::MalformedHeader(line.to_string()))?;
                        let m = b
                            .parse::<u64>()
                            .map_err(|_| SequenceError::MalformedHeader(line.to_string()))?;
                        header = Some((n, m));
                    }
                    _ => return Err(SequenceError::MalformedHeader(line.to_string())),
                }
            }
            Some((n, _)) => {
                let key = line
                    .parse::<u64>()
                    .map_err(|_| SequenceError::BadToken(line.to_string(), lineno + 1))?;
                if key < 1 || key > n {
                    return Err(SequenceError::KeyOutOfRange {
                        key,
                        line: lineno + 1,
                        n,
                    });
                }
                keys.push(Key(key));
            }
        }
    }
    let (n, m) = header.ok_or_else(|| SequenceError::MalformedHeader(String::new()))?;
    if keys.len() as u64 != m {
        return Err(SequenceError::LengthMismatch {
            expected: m,
            actual: keys.len() as u64,
        });
    }
    Ok((n, keys))
}

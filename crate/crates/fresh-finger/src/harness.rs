//! Replay driver: runs an access sequence through a structure, records
//! per-access comparison costs alongside oracle bound values, fits
//! constants, and emits trace/summary reports.
//!
//! The trace is a CSV with one row per access; oracle columns are filled
//! only on audited rows (every row for `i <= 1000`, then every
//! `audit_every`-th). The summary is a JSON object suitable for `compare`.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{BaselineError, SplayTree, StaticBst};
use crate::hierarchy::{DictError, EvictionPolicy, FreshFingerDict, ViolationKind};
use crate::key::Key;
use crate::oracle::History;
use crate::sequences::{self, SequenceError, SequenceSpec};

/// Number of leading accesses that are always audited.
pub const FULL_AUDIT_PREFIX: u64 = 1000;
/// Runs at or below this length must be fully audited.
pub const SMALL_SCALE: u64 = 10_000;
/// `audit` refuses traces with fewer audited rows than this.
pub const MIN_AUDITED_ROWS: usize = 100;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("audit_every must be >= 1")]
    BadAuditEvery,
    #[error("m = {m} <= {SMALL_SCALE} requires audit_every = 1, got {audit_every}")]
    SmallScaleNeedsFullAudit { m: u64, audit_every: u64 },
    #[error("unknown structure {0:?}")]
    UnknownStructure(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Dict(#[from] DictError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("invariant violation at access {index}:\n{report}")]
    InvariantViolation { index: u64, report: String },
    #[error("trace holds {0} audited rows; need at least {MIN_AUDITED_ROWS}")]
    InsufficientAuditedRows(usize),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error("need at least two summaries to compare")]
    TooFewSummaries,
    #[error("summaries cover different sequences: {0} vs {1}")]
    MismatchedSequences(String, String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Which structure a run replays into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureKind {
    /// Fresh-finger dictionary under the default skip-and-requeue policy.
    Ff,
    /// Fresh-finger dictionary under strict FIFO (subset breaks tolerated).
    FfP1,
    /// Fresh-finger dictionary under full refresh.
    FfP3,
    Bst,
    Splay,
}

impl StructureKind {
    pub fn parse(name: &str) -> Result<Self, HarnessError> {
        match name {
            "ff" => Ok(StructureKind::Ff),
            "ff-p1" => Ok(StructureKind::FfP1),
            "ff-p3" => Ok(StructureKind::FfP3),
            "bst" => Ok(StructureKind::Bst),
            "splay" => Ok(StructureKind::Splay),
            other => Err(HarnessError::UnknownStructure(other.to_string())),
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureKind::Ff => "ff",
            StructureKind::FfP1 => "ff-p1",
            StructureKind::FfP3 => "ff-p3",
            StructureKind::Bst => "bst",
            StructureKind::Splay => "splay",
        };
        f.write_str(s)
    }
}

/// Where the access sequence comes from.
#[derive(Clone, Debug)]
pub enum SequenceSource {
    Spec(SequenceSpec),
    File(PathBuf),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub structure: StructureKind,
    pub source: SequenceSource,
    /// Oracle sampling stride beyond the fully audited prefix.
    pub audit_every: u64,
    pub trace_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
}

/// One trace row; oracle fields are present only on audited rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub i: u64,
    pub key: u64,
    pub found_level: u32,
    pub cmp_descent: u64,
    pub cmp_final: u64,
    pub cmp_restructure: u64,
    pub cmp_total: u64,
    pub w_i: Option<u64>,
    pub su: Option<f64>,
    pub additive: Option<f64>,
    pub theorem2_bound: Option<f64>,
}

pub const TRACE_HEADER: &str =
    "i,key,found_level,cmp_descent,cmp_final,cmp_restructure,cmp_total,w_i,su,additive,theorem2_bound";

impl TraceRow {
    fn to_csv(&self) -> String {
        let oracle = match (self.w_i, self.su, self.additive, self.theorem2_bound) {
            (Some(w), Some(su), Some(add), Some(bound)) => {
                format!("{w},{su:.6},{add:.6},{bound:.6}")
            }
            _ => ",,,".to_string(),
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            self.i,
            self.key,
            self.found_level,
            self.cmp_descent,
            self.cmp_final,
            self.cmp_restructure,
            self.cmp_total,
            oracle
        )
    }

    fn from_csv(line: &str) -> Result<Self, HarnessError> {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 11 {
            return Err(HarnessError::MalformedTrace(format!(
                "expected 11 columns, got {}: {line:?}",
                cols.len()
            )));
        }
        fn int(s: &str, line: &str) -> Result<u64, HarnessError> {
            s.parse()
                .map_err(|_| HarnessError::MalformedTrace(format!("bad integer {s:?} in {line:?}")))
        }
        fn opt_f(s: &str, line: &str) -> Result<Option<f64>, HarnessError> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| HarnessError::MalformedTrace(format!("bad float {s:?} in {line:?}")))
        }
        Ok(TraceRow {
            i: int(cols[0], line)?,
            key: int(cols[1], line)?,
            found_level: int(cols[2], line)? as u32,
            cmp_descent: int(cols[3], line)?,
            cmp_final: int(cols[4], line)?,
            cmp_restructure: int(cols[5], line)?,
            cmp_total: int(cols[6], line)?,
            w_i: if cols[7].is_empty() {
                None
            } else {
                Some(int(cols[7], line)?)
            },
            su: opt_f(cols[8], line)?,
            additive: opt_f(cols[9], line)?,
            theorem2_bound: opt_f(cols[10], line)?,
        })
    }
}

/// Least-squares fit of `cmp_total ~ c1 * bound + c2` plus the worst-case
/// ratio, computed over audited rows. `max_ratio` is the acceptance-bearing
/// statistic; the fit is diagnostic. A degenerate fit (constant bound)
/// reports `c1 = 0` with `c2` the mean cost.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FitReport {
    pub c1: f64,
    pub c2: f64,
    pub max_ratio: f64,
}

pub fn fit_costs(points: &[(f64, f64)]) -> FitReport {
    let n = points.len() as f64;
    if points.is_empty() {
        return FitReport {
            c1: 0.0,
            c2: 0.0,
            max_ratio: 0.0,
        };
    }
    let mean_b = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_c = points.iter().map(|p| p.1).sum::<f64>() / n;
    let var_b = points.iter().map(|p| (p.0 - mean_b).powi(2)).sum::<f64>() / n;
    let cov = points
        .iter()
        .map(|p| (p.0 - mean_b) * (p.1 - mean_c))
        .sum::<f64>()
        / n;
    let (c1, c2) = if var_b < 1e-12 {
        (0.0, mean_c)
    } else {
        let c1 = cov / var_b;
        (c1, mean_c - c1 * mean_b)
    };
    let max_ratio = points.iter().map(|p| p.1 / p.0).fold(0.0f64, f64::max);
    FitReport { c1, c2, max_ratio }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Totals {
    pub accesses: u64,
    pub comparisons: u64,
    pub cmp_descent: u64,
    pub cmp_final: u64,
    pub cmp_restructure: u64,
    pub restructure_steps: u64,
    pub audited_rows: u64,
    /// Subset-chain findings tolerated under strict FIFO; zero elsewhere.
    pub subset_breaks: u64,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Averages {
    pub cmp_per_access: f64,
    pub cmp_descent: f64,
    pub cmp_final: f64,
    pub cmp_restructure: f64,
    pub found_level: f64,
    /// Mean bound over audited rows.
    pub theorem2_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub structure: String,
    pub sequence_spec: SequenceSpec,
    pub totals: Totals,
    pub averages: Averages,
    pub fit: FitReport,
    pub invariants_ok: bool,
}

enum Runner {
    Ff(FreshFingerDict),
    Bst(StaticBst),
    Splay(SplayTree),
}

struct RowCore {
    found_level: u32,
    cmp_descent: u64,
    cmp_final: u64,
    cmp_restructure: u64,
    cmp_total: u64,
    restructure_steps: u64,
}

impl Runner {
    fn new(kind: StructureKind, n: u64) -> Result<Self, HarnessError> {
        Ok(match kind {
            StructureKind::Ff => Runner::Ff(FreshFingerDict::new(n, EvictionPolicy::SkipRequeue)?),
            StructureKind::FfP1 => Runner::Ff(FreshFingerDict::new(n, EvictionPolicy::StrictFifo)?),
            StructureKind::FfP3 => {
                Runner::Ff(FreshFingerDict::new(n, EvictionPolicy::FullRefresh)?)
            }
            StructureKind::Bst => Runner::Bst(StaticBst::new(n)),
            StructureKind::Splay => Runner::Splay(SplayTree::new(n)),
        })
    }

    fn access(&mut self, x: Key) -> Result<RowCore, HarnessError> {
        Ok(match self {
            Runner::Ff(dict) => {
                let rec = dict.access(x)?;
                RowCore {
                    found_level: rec.found_level,
                    cmp_descent: rec.cmp_descent,
                    cmp_final: rec.cmp_final,
                    cmp_restructure: rec.cmp_restructure,
                    cmp_total: rec.cmp_total,
                    restructure_steps: rec.restructure_steps,
                }
            }
            Runner::Bst(bst) => {
                let cmp = bst.access(x)?;
                RowCore {
                    found_level: 1,
                    cmp_descent: 0,
                    cmp_final: cmp,
                    cmp_restructure: 0,
                    cmp_total: cmp,
                    restructure_steps: 0,
                }
            }
            Runner::Splay(splay) => {
                let cmp = splay.access(x)?;
                RowCore {
                    found_level: 1,
                    cmp_descent: 0,
                    cmp_final: cmp,
                    cmp_restructure: 0,
                    cmp_total: cmp,
                    restructure_steps: 0,
                }
            }
        })
    }

    fn dict(&self) -> Option<&FreshFingerDict> {
        match self {
            Runner::Ff(dict) => Some(dict),
            _ => None,
        }
    }
}

/// Resolves the configured sequence source to `(n, keys, spec)`.
pub fn resolve_sequence(
    source: &SequenceSource,
) -> Result<(u64, Vec<Key>, SequenceSpec), HarnessError> {
    match source {
        SequenceSource::Spec(spec) => {
            let keys = sequences::generate(spec)?;
            Ok((spec.n, keys, spec.clone()))
        }
        SequenceSource::File(path) => {
            let (n, keys) = sequences::read_file(path)?;
            let spec = SequenceSpec::from_file(path, n, keys.len() as u64);
            Ok((n, keys, spec))
        }
    }
}

/// Whether row `i` (1-based) is audited under stride `audit_every`.
pub fn is_audited(i: u64, audit_every: u64) -> bool {
    i <= FULL_AUDIT_PREFIX || i.is_multiple_of(audit_every)
}

/// Replays the configured sequence, writing the trace and summary if paths
/// are set, and returns the summary. Aborts with `InvariantViolation` if an
/// audited row fails `check_invariants` (strict-FIFO subset breaks are
/// counted instead of fatal).
pub fn run(config: &RunConfig) -> Result<RunSummary, HarnessError> {
    if config.audit_every == 0 {
        return Err(HarnessError::BadAuditEvery);
    }
    let (n, keys, spec) = resolve_sequence(&config.source)?;
    let m = keys.len() as u64;
    if m <= SMALL_SCALE && config.audit_every != 1 {
        return Err(HarnessError::SmallScaleNeedsFullAudit {
            m,
            audit_every: config.audit_every,
        });
    }
    let mut runner = Runner::new(config.structure, n)?;
    let mut history = History::new(n);
    let mut trace = match &config.trace_path {
        Some(path) => {
            let mut w = BufWriter::new(fs::File::create(path)?);
            writeln!(w, "{TRACE_HEADER}")?;
            Some(w)
        }
        None => None,
    };

    let mut totals = Totals::default();
    let mut found_level_sum = 0u64;
    let mut bound_sum = 0.0f64;
    let mut points: Vec<(f64, f64)> = Vec::new();

    for (idx, &x) in keys.iter().enumerate() {
        let i = idx as u64 + 1;
        let audited = is_audited(i, config.audit_every);
        let oracle = if audited {
            Some(history.theorem2_bound(x))
        } else {
            None
        };
        let core = runner.access(x)?;
        if audited {
            if let Some(dict) = runner.dict() {
                let violations = dict.check_invariants();
                let tolerate_subset = dict.policy() == EvictionPolicy::StrictFifo;
                let (subset, fatal): (Vec<_>, Vec<_>) = violations
                    .into_iter()
                    .partition(|v| v.kind == ViolationKind::SubsetChain && tolerate_subset);
                totals.subset_breaks += subset.len() as u64;
                if !fatal.is_empty() {
                    let report = fatal
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("\n");
                    return Err(HarnessError::InvariantViolation { index: i, report });
                }
            }
        }

        totals.accesses += 1;
        totals.comparisons += core.cmp_total;
        totals.cmp_descent += core.cmp_descent;
        totals.cmp_final += core.cmp_final;
        totals.cmp_restructure += core.cmp_restructure;
        totals.restructure_steps += core.restructure_steps;
        found_level_sum += core.found_level as u64;
        if audited {
            totals.audited_rows += 1;
        }
        let row = TraceRow {
            i,
            key: x.0,
            found_level: core.found_level,
            cmp_descent: core.cmp_descent,
            cmp_final: core.cmp_final,
            cmp_restructure: core.cmp_restructure,
            cmp_total: core.cmp_total,
            w_i: oracle.as_ref().map(|b| b.w),
            su: oracle.as_ref().map(|b| b.su),
            additive: oracle.as_ref().map(|b| b.additive),
            theorem2_bound: oracle.as_ref().map(|b| b.theorem2),
        };
        if let Some(b) = &oracle {
            bound_sum += b.theorem2;
            points.push((b.theorem2, core.cmp_total as f64));
        }
        if let Some(w) = trace.as_mut() {
            writeln!(w, "{}", row.to_csv())?;
        }
        history.push(x);
    }
    if let Some(mut w) = trace.take() {
        w.flush()?;
    }

    let mf = m as f64;
    let summary = RunSummary {
        structure: config.structure.to_string(),
        sequence_spec: spec,
        totals,
        averages: Averages {
            cmp_per_access: totals.comparisons as f64 / mf,
            cmp_descent: totals.cmp_descent as f64 / mf,
            cmp_final: totals.cmp_final as f64 / mf,
            cmp_restructure: totals.cmp_restructure as f64 / mf,
            found_level: found_level_sum as f64 / mf,
            theorem2_bound: if totals.audited_rows > 0 {
                bound_sum / totals.audited_rows as f64
            } else {
                0.0
            },
        },
        fit: fit_costs(&points),
        invariants_ok: true,
    };
    if let Some(path) = &config.summary_path {
        fs::write(path, serde_json::to_string_pretty(&summary)?)?;
    }
    Ok(summary)
}

/// Reads a trace CSV back into rows.
pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>, HarnessError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        other => {
            return Err(HarnessError::MalformedTrace(format!(
                "bad header {other:?}"
            )))
        }
    }
    lines.map(TraceRow::from_csv).collect()
}

/// Recomputes the fit from a written trace; refuses thin audits.
pub fn audit(trace_path: &Path) -> Result<FitReport, HarnessError> {
    let rows = read_trace(trace_path)?;
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.theorem2_bound.map(|b| (b, r.cmp_total as f64)))
        .collect();
    if points.len() < MIN_AUDITED_ROWS {
        return Err(HarnessError::InsufficientAuditedRows(points.len()));
    }
    Ok(fit_costs(&points))
}

/// Side-by-side view of several summaries over the same sequence.
#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub structure: String,
    pub avg_cmp: f64,
    /// Ratio of this structure's average to the first summary's.
    pub ratio_to_first: f64,
    pub invariants_ok: bool,
    pub subset_breaks: u64,
}

pub fn compare(summaries: &[RunSummary]) -> Result<Vec<CompareRow>, HarnessError> {
    if summaries.len() < 2 {
        return Err(HarnessError::TooFewSummaries);
    }
    let base = &summaries[0];
    for s in &summaries[1..] {
        if s.sequence_spec != base.sequence_spec {
            return Err(HarnessError::MismatchedSequences(
                serde_json::to_string(&base.sequence_spec)?,
                serde_json::to_string(&s.sequence_spec)?,
            ));
        }
    }
    let base_avg = base.averages.cmp_per_access;
    Ok(summaries
        .iter()
        .map(|s| CompareRow {
            structure: s.structure.clone(),
            avg_cmp: s.averages.cmp_per_access,
            ratio_to_first: s.averages.cmp_per_access / base_avg,
            invariants_ok: s.invariants_ok,
            subset_breaks: s.totals.subset_breaks,
        })
        .collect())
}

pub fn render_compare_table(rows: &[CompareRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<10} {:>12} {:>10} {:>12} {:>14}\n",
        "structure", "avg_cmp", "ratio", "invariants", "subset_breaks"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<10} {:>12.4} {:>10.4} {:>12} {:>14}\n",
            row.structure,
            row.avg_cmp,
            row.ratio_to_first,
            if row.invariants_ok { "ok" } else { "VIOLATED" },
            row.subset_breaks
        ));
    }
    out
}

pub fn load_summary(path: &Path) -> Result<RunSummary, HarnessError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

//! Trace/summary formats, replay determinism, and the ffdict CLI surface.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use fresh_finger::harness::{self, RunConfig, SequenceSource, StructureKind, TRACE_HEADER};
use fresh_finger::oracle::History;
use fresh_finger::sequences::{self, SequenceSpec};
use fresh_finger::Key;

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ffdict-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_to_files(
    dir: &Path,
    structure: StructureKind,
    spec: &SequenceSpec,
    tag: &str,
) -> (PathBuf, PathBuf) {
    let trace = dir.join(format!("{tag}.trace.csv"));
    let summary = dir.join(format!("{tag}.summary.json"));
    harness::run(&RunConfig {
        structure,
        source: SequenceSource::Spec(spec.clone()),
        audit_every: 1,
        trace_path: Some(trace.clone()),
        summary_path: Some(summary.clone()),
    })
    .unwrap();
    (trace, summary)
}

#[test]
fn replay_is_byte_identical() {
    let dir = scratch_dir("determinism");
    let spec = SequenceSpec::uniform(256, 3000, 9);
    let (t1, s1) = run_to_files(&dir, StructureKind::Ff, &spec, "a");
    let (t2, s2) = run_to_files(&dir, StructureKind::Ff, &spec, "b");
    assert_eq!(fs::read(&t1).unwrap(), fs::read(&t2).unwrap());
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn totals_equal_trace_column_sums() {
    let dir = scratch_dir("conservation");
    let spec = SequenceSpec::uniform(128, 2000, 3);
    let (trace, summary) = run_to_files(&dir, StructureKind::Ff, &spec, "run");
    let rows = harness::read_trace(&trace).unwrap();
    let summary = harness::load_summary(&summary).unwrap();
    assert_eq!(rows.len() as u64, summary.totals.accesses);
    let total: u64 = rows.iter().map(|r| r.cmp_total).sum();
    assert_eq!(total, summary.totals.comparisons);
    assert_eq!(
        rows.iter().map(|r| r.cmp_descent).sum::<u64>(),
        summary.totals.cmp_descent
    );
    assert_eq!(
        rows.iter().map(|r| r.cmp_restructure).sum::<u64>(),
        summary.totals.cmp_restructure
    );
    for row in &rows {
        assert_eq!(
            row.cmp_total,
            row.cmp_descent + row.cmp_final + row.cmp_restructure
        );
    }
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn audited_rows_match_post_hoc_oracle() {
    let dir = scratch_dir("oracle-agreement");
    let spec = SequenceSpec::uniform(200, 1500, 21);
    let (trace, _) = run_to_files(&dir, StructureKind::Ff, &spec, "run");
    let rows = harness::read_trace(&trace).unwrap();
    let keys = sequences::generate(&spec).unwrap();
    let mut history = History::new(spec.n);
    for (row, &key) in rows.iter().zip(&keys) {
        assert_eq!(row.key, key.0);
        let bound = history.theorem2_bound(key);
        assert_eq!(row.w_i, Some(bound.w));
        // values round-trip through the trace at 6-decimal precision
        assert_eq!(
            row.su.unwrap(),
            format!("{:.6}", bound.su).parse::<f64>().unwrap()
        );
        assert_eq!(
            row.theorem2_bound.unwrap(),
            format!("{:.6}", bound.theorem2).parse::<f64>().unwrap()
        );
        history.push(key);
    }
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn audit_requires_enough_rows() {
    let dir = scratch_dir("audit-thin");
    let path = dir.join("thin.csv");
    let mut text = format!("{TRACE_HEADER}\n");
    for i in 1..=40 {
        text.push_str(&format!("{i},1,1,0,1,0,1,1,1.000000,1.000000,2.000000\n"));
    }
    fs::write(&path, text).unwrap();
    assert!(matches!(
        harness::audit(&path),
        Err(harness::HarnessError::InsufficientAuditedRows(40))
    ));
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn audit_fits_synthetic_traces() {
    let dir = scratch_dir("audit-fit");

    // cost exactly twice the bound
    let path = dir.join("double.csv");
    let mut text = format!("{TRACE_HEADER}\n");
    for i in 1..=150u64 {
        let bound = 2.0 + (i % 7) as f64;
        let cost = (2.0 * bound) as u64;
        text.push_str(&format!(
            "{i},1,1,0,{cost},0,{cost},1,1.000000,1.000000,{bound:.6}\n"
        ));
    }
    fs::write(&path, text).unwrap();
    let fit = harness::audit(&path).unwrap();
    assert!((fit.c1 - 2.0).abs() < 1e-9, "c1 = {}", fit.c1);
    assert!(fit.c2.abs() < 1e-9);
    assert!((fit.max_ratio - 2.0).abs() < 1e-9);

    // constant cost 5 against constant bound 2: degenerate slope
    let path = dir.join("flat.csv");
    let mut text = format!("{TRACE_HEADER}\n");
    for i in 1..=150u64 {
        text.push_str(&format!("{i},1,1,0,5,0,5,1,1.000000,1.000000,2.000000\n"));
    }
    fs::write(&path, text).unwrap();
    let fit = harness::audit(&path).unwrap();
    assert_eq!(fit.c1, 0.0);
    assert!((fit.c2 - 5.0).abs() < 1e-9);
    assert!((fit.max_ratio - 2.5).abs() < 1e-9);

    fs::remove_dir_all(&dir).ok();
}

#[test]
fn compare_same_run_is_unity_and_mismatch_rejected() {
    let spec = SequenceSpec::uniform(128, 2000, 3);
    let run = |s: StructureKind, spec: &SequenceSpec| {
        harness::run(&RunConfig {
            structure: s,
            source: SequenceSource::Spec(spec.clone()),
            audit_every: 1,
            trace_path: None,
            summary_path: None,
        })
        .unwrap()
    };
    let a = run(StructureKind::Ff, &spec);
    let b = run(StructureKind::Ff, &spec);
    let rows = harness::compare(&[a.clone(), b]).unwrap();
    assert!((rows[1].ratio_to_first - 1.0).abs() < 1e-12);

    let other = run(StructureKind::Ff, &SequenceSpec::uniform(128, 2000, 4));
    assert!(matches!(
        harness::compare(&[a.clone(), other]),
        Err(harness::HarnessError::MismatchedSequences(_, _))
    ));
    assert!(matches!(
        harness::compare(&[a]),
        Err(harness::HarnessError::TooFewSummaries)
    ));
}

// ---- CLI surface ----

fn ffdict() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ffdict"))
}

#[test]
fn cli_gen_run_audit_compare_pipeline() {
    let dir = scratch_dir("cli");
    let seq = dir.join("eq1.seq");
    let status = ffdict()
        .args(["gen", "--kind", "interleaved", "--n", "64", "--m", "1024"])
        .args(["--out", seq.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let (n, keys) = sequences::read_file(&seq).unwrap();
    assert_eq!((n, keys.len()), (64, 1024));
    assert_eq!(keys[..4], [Key(1), Key(33), Key(2), Key(34)]);

    let trace = dir.join("ff.trace.csv");
    let mut summaries = Vec::new();
    for structure in ["ff", "splay"] {
        let summary = dir.join(format!("{structure}.summary.json"));
        let status = ffdict()
            .args(["run", "--structure", structure])
            .args(["--seq", seq.to_str().unwrap()])
            .args(["--trace", trace.to_str().unwrap()])
            .args(["--summary", summary.to_str().unwrap()])
            .args(["--audit-every", "1"])
            .status()
            .unwrap();
        assert!(status.success());
        summaries.push(summary);
    }

    let out = ffdict()
        .args(["audit", "--trace", trace.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let fit: harness::FitReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(fit.max_ratio > 0.0);

    let out = ffdict()
        .arg("compare")
        .arg(&summaries[0])
        .arg(&summaries[1])
        .output()
        .unwrap();
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("ff"));
    assert!(table.contains("splay"));

    fs::remove_dir_all(&dir).ok();
}

#[test]
fn cli_exit_codes() {
    // usage error: unknown subcommand flag
    let status = ffdict()
        .args(["run", "--structure", "btree"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // usage error: unknown structure with otherwise valid args
    let dir = scratch_dir("cli-codes");
    let seq = dir.join("s.seq");
    fs::write(&seq, "8 2\n1\n2\n").unwrap();
    let status = ffdict()
        .args([
            "run",
            "--structure",
            "btree",
            "--seq",
            seq.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    // I/O error: missing sequence file
    let status = ffdict()
        .args(["run", "--structure", "ff", "--seq"])
        .arg(dir.join("missing.seq"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));

    // success in the small
    let status = ffdict()
        .args(["run", "--structure", "ff", "--seq", seq.to_str().unwrap()])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    fs::remove_dir_all(&dir).ok();
}

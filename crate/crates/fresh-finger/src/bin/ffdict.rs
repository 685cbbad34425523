//! Thin command-line front end over the library: generate benchmark
//! sequences, replay them through a structure, audit traces, and compare
//! run summaries.
//!
//! Exit codes: 0 success, 1 usage error, 2 invariant violation, 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fresh_finger::harness::{self, HarnessError, RunConfig, SequenceSource, StructureKind};
use fresh_finger::sequences::{self, SequenceError, SequenceKind, SequenceSpec};

#[derive(Parser)]
#[command(
    name = "ffdict",
    version,
    about = "comparison-counting dictionary benchmark driver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an access-sequence file.
    Gen(GenArgs),
    /// Replay a sequence file through a structure, recording a trace and summary.
    Run(RunArgs),
    /// Recompute the bound fit from a trace file.
    Audit(AuditArgs),
    /// Compare two or more run summaries over the same sequence.
    Compare(CompareArgs),
}

#[derive(Args)]
struct GenArgs {
    /// interleaved | strided | warmup-uniform | uniform | round-robin
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    m: u64,
    /// Stride (strided only).
    #[arg(long = "K")]
    k: Option<u64>,
    /// Warm-up prefix length (warmup-uniform only).
    #[arg(long)]
    r: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// ff | ff-p1 | ff-p3 | bst | splay
    #[arg(long)]
    structure: String,
    #[arg(long)]
    seq: PathBuf,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Oracle sampling stride beyond the always-audited first 1000 accesses.
    #[arg(long = "audit-every", default_value_t = 1)]
    audit_every: u64,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    trace: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Summary JSON files; the first is the ratio baseline.
    #[arg(required = true, num_args = 2..)]
    summaries: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &HarnessError) -> u8 {
    match err {
        HarnessError::InvariantViolation { .. } => 2,
        HarnessError::Io(_) | HarnessError::Json(_) => 3,
        HarnessError::Sequence(SequenceError::Io(_)) => 3,
        _ => 1,
    }
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Gen(args) => {
            let kind = match args.kind.as_str() {
                "interleaved" => SequenceKind::Interleaved,
                "strided" => SequenceKind::Strided,
                "warmup-uniform" => SequenceKind::WarmupUniform,
                "uniform" => SequenceKind::Uniform,
                "round-robin" => SequenceKind::RoundRobin,
                other => return Err(HarnessError::UnknownStructure(format!("kind {other}"))),
            };
            let spec = SequenceSpec {
                kind,
                n: args.n,
                m: args.m,
                k: args.k,
                r: args.r,
                seed: args.seed,
                path: None,
            };
            let keys = sequences::generate(&spec)?;
            sequences::write_file(&args.out, spec.n, &keys, Some(&spec))?;
            println!(
                "wrote {} accesses over [1, {}] to {}",
                keys.len(),
                spec.n,
                args.out.display()
            );
            Ok(())
        }
        Command::Run(args) => {
            let config = RunConfig {
                structure: StructureKind::parse(&args.structure)?,
                source: SequenceSource::File(args.seq),
                audit_every: args.audit_every,
                trace_path: args.trace,
                summary_path: args.summary,
            };
            let summary = harness::run(&config)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(())
        }
        Command::Audit(args) => {
            let fit = harness::audit(&args.trace)?;
            println!("{}", serde_json::to_string_pretty(&fit)?);
            Ok(())
        }
        Command::Compare(args) => {
            let summaries = args
                .summaries
                .iter()
                .map(|p| harness::load_summary(p))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = harness::compare(&summaries)?;
            print!("{}", harness::render_compare_table(&rows));
            Ok(())
        }
    }
}

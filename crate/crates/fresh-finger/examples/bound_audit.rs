//! Audits measured comparison counts against the per-access bound: replay a
//! workload with the oracle enabled on every row and fit
//! `comparisons ~ c1 * bound + c2`, reporting the worst-case ratio.
//!
//! ```bash
//! cargo run -p fresh-finger --example bound_audit
//! ```

use fresh_finger::harness::{self, RunConfig, SequenceSource, StructureKind};
use fresh_finger::sequences::SequenceSpec;

fn main() {
    let n = 1u64 << 10;
    let m = 16 * n;
    for (name, spec) in [
        ("interleaved", SequenceSpec::interleaved(n, m)),
        ("strided K=32", SequenceSpec::strided(n, m, 32)),
        (
            "warmup-uniform r=64",
            SequenceSpec::warmup_uniform(n, m, 64, 7),
        ),
        ("uniform", SequenceSpec::uniform(n, m, 7)),
    ] {
        let summary = harness::run(&RunConfig {
            structure: StructureKind::Ff,
            source: SequenceSource::Spec(spec),
            audit_every: 1,
            trace_path: None,
            summary_path: None,
        })
        .unwrap();
        println!(
            "{name:20} avg cmp {:>6.2} | avg bound {:>6.2} | fit c1={:>5.2} c2={:>6.2} | max cmp/bound {:.2}",
            summary.averages.cmp_per_access,
            summary.averages.theorem2_bound,
            summary.fit.c1,
            summary.fit.c2,
            summary.fit.max_ratio,
        );
    }
    println!();
    println!("max cmp/bound is the number to watch: it should stay put as n grows.");
}

//! The dictionary against plain binary search and a splay tree on the two
//! half-interleaved sweeps. The strided sweep is the separating workload:
//! every access lands far from the previous one in raw key space but next
//! to it among recently accessed keys.
//!
//! ```bash
//! cargo run -p fresh-finger --example baseline_faceoff
//! ```

use fresh_finger::harness::{self, RunConfig, SequenceSource, StructureKind};
use fresh_finger::sequences::SequenceSpec;

fn faceoff(name: &str, spec: SequenceSpec) {
    println!("{name} (n = {}, m = {}):", spec.n, spec.m);
    let mut summaries = Vec::new();
    for structure in [StructureKind::Ff, StructureKind::Bst, StructureKind::Splay] {
        let summary = harness::run(&RunConfig {
            structure,
            source: SequenceSource::Spec(spec.clone()),
            audit_every: spec.m,
            trace_path: None,
            summary_path: None,
        })
        .unwrap();
        summaries.push(summary);
    }
    print!(
        "{}",
        harness::render_compare_table(&harness::compare(&summaries).unwrap())
    );
    println!();
}

fn main() {
    let n = 1u64 << 16;
    let m = 16 * n;
    faceoff("interleaved sweep", SequenceSpec::interleaved(n, m));
    faceoff("strided sweep, K = 256", SequenceSpec::strided(n, m, 256));
    println!("binary search pays the full log for every strided access;");
    println!("the tower resolves them in the level holding the recent keys.");
}

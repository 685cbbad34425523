//! Generates the benchmark sequence files used throughout the examples and
//! the CLI walkthrough in the README.
//!
//! ```bash
//! cargo run -p fresh-finger --example generate_workloads -- [out_dir]
//! ```

use std::path::PathBuf;

use fresh_finger::sequences::{self, SequenceSpec};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("workloads"));
    std::fs::create_dir_all(&dir).unwrap();

    let n = 1u64 << 10;
    let specs = [
        ("interleaved.seq", SequenceSpec::interleaved(n, 16 * n)),
        ("strided.seq", SequenceSpec::strided(n, 16 * n, 32)),
        (
            "warmup_uniform.seq",
            SequenceSpec::warmup_uniform(n, 16 * n, 64, 1),
        ),
        ("uniform.seq", SequenceSpec::uniform(n, 16 * n, 1)),
        ("round_robin.seq", SequenceSpec::round_robin(n, n + 1)),
    ];
    for (name, spec) in specs {
        let keys = sequences::generate(&spec).unwrap();
        let path = dir.join(name);
        sequences::write_file(&path, spec.n, &keys, Some(&spec)).unwrap();
        println!(
            "{:<34} kind={:<15} n={} m={}",
            path.display().to_string(),
            spec.kind.to_string(),
            spec.n,
            keys.len()
        );
    }
    println!();
    println!("replay one with:");
    println!("  cargo run -p fresh-finger --bin ffdict -- run --structure ff \\");
    println!(
        "      --seq {}/interleaved.seq --trace trace.csv --summary ff.json --audit-every 16",
        dir.display()
    );
}

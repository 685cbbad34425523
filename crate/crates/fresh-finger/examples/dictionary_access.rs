//! The fresh-finger dictionary in action: per-phase cost breakdowns and how
//! recency pulls keys down the tower.
//!
//! ```bash
//! cargo run -p fresh-finger --example dictionary_access
//! ```

use fresh_finger::hierarchy::{EvictionPolicy, FreshFingerDict};
use fresh_finger::Key;

fn main() {
    let n = 1u64 << 16;
    let mut dict = FreshFingerDict::new(n, EvictionPolicy::SkipRequeue).unwrap();
    println!(
        "n = {n}: {} levels with capacities {:?}",
        dict.k(),
        (1..=dict.k()).map(|j| dict.capacity(j)).collect::<Vec<_>>()
    );

    let show = |tag: &str, rec: &fresh_finger::hierarchy::AccessRecord| {
        println!(
            "{tag:28} found at level {} | descent {:2} + final {:2} + restructure {} = {:2} comparisons",
            rec.found_level, rec.cmp_descent, rec.cmp_final, rec.cmp_restructure, rec.cmp_total
        );
    };

    let rec = dict.access(Key(40_000)).unwrap();
    show("cold access to 40000:", &rec);
    let rec = dict.access(Key(40_000)).unwrap();
    show("same key again:", &rec);
    let rec = dict.access(Key(40_001)).unwrap();
    show("neighbor 40001:", &rec);
    let rec = dict.access(Key(39_990)).unwrap();
    show("nearby 39990:", &rec);
    let rec = dict.access(Key(7)).unwrap();
    show("far-away 7:", &rec);

    // Churn through a working set; everything resolves low in the tower.
    for key in 100..116u64 {
        dict.access(Key(key)).unwrap();
    }
    let mut total = 0u64;
    let mut levels = 0u64;
    for round in 0..50u64 {
        for key in 100..116u64 {
            let rec = dict.access(Key(key)).unwrap();
            if round > 0 {
                total += rec.cmp_total;
                levels += rec.found_level as u64;
            }
        }
    }
    println!(
        "cycling a 16-key working set: {:.2} comparisons and level {:.2} on average (log2 n = {})",
        total as f64 / (49.0 * 16.0),
        levels as f64 / (49.0 * 16.0),
        (n as f64).log2()
    );

    let violations = dict.check_invariants();
    println!("invariant audit: {} violations", violations.len());
}

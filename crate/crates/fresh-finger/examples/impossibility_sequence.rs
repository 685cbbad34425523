//! Why rank distance must be measured in the squared working set: on the
//! history <1, 2, ..., n, 1>, measuring inside W(w) would promise constant
//! time for every possible next access, which no comparison-based structure
//! can deliver. Widening to W(w^2) restores an information-theoretically
//! sane average.
//!
//! ```bash
//! cargo run -p fresh-finger --example impossibility_sequence
//! ```

use fresh_finger::oracle::History;
use fresh_finger::Key;

fn main() {
    for n in [64u64, 1024] {
        let mut h = History::new(n);
        for key in 1..=n {
            h.push(Key(key));
        }
        h.push(Key(1));

        let mut worst_narrow = 0.0f64;
        let mut sum_wide = 0.0f64;
        for x in (1..=n).map(Key) {
            let w = h.working_set_number(x, x);
            let narrow_set = h.working_set(x, w);
            worst_narrow = worst_narrow.max(h.su_term_within(x, &narrow_set));
            sum_wide += h.su_term(x);
        }
        println!(
            "n = {n:5}: narrow-set bound <= {worst_narrow:.3} for EVERY key; \
             widened average {:.3} (log2 n = {:.1})",
            sum_wide / n as f64,
            (n as f64).log2()
        );
    }
    println!();
    println!("the narrow form promises O(1) for all n possible accesses at once,");
    println!("which is impossible; the widened form grows with log n as it must.");
}

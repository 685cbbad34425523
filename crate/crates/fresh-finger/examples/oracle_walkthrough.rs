//! Walkthrough of the bound quantities on the sixteen-key history
//! <2, 3, ..., 16, 1> with 15 as the in-flight access.
//!
//! ```bash
//! cargo run -p fresh-finger --example oracle_walkthrough
//! ```

use fresh_finger::oracle::History;
use fresh_finger::Key;

fn main() {
    let mut h = History::new(16);
    for key in (2..=16).chain([1]) {
        h.push(Key(key));
    }
    let x = Key(15);
    println!("history: {:?} + in-flight access {x}", raw(h.accesses()));

    let l = h.last_occurrence(x).unwrap();
    let w = h.working_set_number(x, x);
    println!("last occurrence of {x}: {l} accesses back");
    println!("working-set number w({x}) = {w} (distinct keys in the window, inclusive)");

    let small = h.working_set(x, w);
    let big = h.working_set(x, w * w);
    println!("W(w)   = {:?}", raw(&small));
    println!(
        "W(w^2) = {:?}  <- the set the finger is chosen from",
        raw(&big)
    );

    let y = h.finger_choice(x, &big);
    println!(
        "finger y = {y}: minimizes working-set number + rank distance (value {})",
        h.fresh_value_within(x, &big)
    );

    let b = h.theorem2_bound(x);
    println!("su term        = {:.4}", b.su);
    println!("additive term  = {:.4}", b.additive);
    println!("per-access bound = {:.4}", b.theorem2);
}

fn raw(keys: &[Key]) -> Vec<u64> {
    keys.iter().map(|k| k.0).collect()
}

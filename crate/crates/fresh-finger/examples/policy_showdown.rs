//! The three eviction policies side by side on a churny workload: strict
//! FIFO can evict a key from a level while it is still resident below
//! (breaking the subset chain); skip-and-requeue and full-refresh keep the
//! chain intact at different bookkeeping costs.
//!
//! ```bash
//! cargo run -p fresh-finger --example policy_showdown
//! ```

use fresh_finger::hierarchy::{EvictionPolicy, FreshFingerDict, ViolationKind};
use fresh_finger::Key;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let n = 256u64;
    let m = 4000u64;
    println!("{m} accesses over a 24-key hot set, n = {n}:\n");
    for policy in [
        EvictionPolicy::StrictFifo,
        EvictionPolicy::SkipRequeue,
        EvictionPolicy::FullRefresh,
    ] {
        let mut dict = FreshFingerDict::new(n, policy).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        let mut total_cmp = 0u64;
        let mut total_steps = 0u64;
        let mut first_break = None;
        for i in 1..=m {
            let x = Key(rng.random_range(1..=24));
            let rec = dict.access(x).unwrap();
            total_cmp += rec.cmp_total;
            total_steps += rec.restructure_steps;
            if first_break.is_none()
                && dict
                    .check_invariants()
                    .iter()
                    .any(|v| v.kind == ViolationKind::SubsetChain)
            {
                first_break = Some(i);
            }
        }
        let chain = match first_break {
            Some(i) => format!("subset chain first broken at access {i}"),
            None => "subset chain intact".to_string(),
        };
        println!(
            "{:32} avg {:>5.2} comparisons, {:>5.2} restructure steps | {chain}",
            policy.to_string(),
            total_cmp as f64 / m as f64,
            total_steps as f64 / m as f64,
        );
    }
}

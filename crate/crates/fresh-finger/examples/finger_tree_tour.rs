//! Tour of the finger-tree substrate: build, finger searches, dovetailed
//! searches, and handle-local updates, with comparison counts along the way.
//!
//! ```bash
//! cargo run -p fresh-finger --example finger_tree_tour
//! ```

use fresh_finger::{FingerTree, Key};

fn main() {
    let keys: Vec<Key> = (1..=64).map(Key).collect();
    let tree = FingerTree::build(&keys).unwrap();
    println!("built a tree over 1..=64 (size {})", tree.size());

    // Finger searches cost comparisons logarithmic in the rank distance.
    let handles: Vec<_> = tree.iter().map(|(_, h)| h).collect();
    for (finger, target) in [(32u64, 33u64), (32, 40), (32, 64), (1, 64)] {
        let res = tree
            .finger_search(handles[finger as usize - 1], Key(target))
            .unwrap();
        println!(
            "search {target} from finger {finger} (distance {:2}): {} comparisons",
            target.abs_diff(finger),
            res.comparisons
        );
    }

    // A dovetailed search from a near and a far finger costs what the near
    // finger would, give or take a step.
    let near = tree.finger_search(handles[40], Key(44)).unwrap();
    let far = tree.finger_search(handles[0], Key(44)).unwrap();
    let dove = tree
        .dovetail_search(handles[40], handles[0], Key(44))
        .unwrap();
    println!(
        "dovetail from fingers 41 and 1 for 44: {} comparisons (singles: {} and {})",
        dove.comparisons, near.comparisons, far.comparisons
    );

    // Misses report both neighbors of the would-be position.
    let mut tree = FingerTree::build(&(1..=64).map(|v| Key(2 * v)).collect::<Vec<_>>()).unwrap();
    let finger = tree.any_handle().unwrap();
    let res = tree.finger_search(finger, Key(63)).unwrap();
    println!(
        "63 in the even tree: found={:?} pred={:?} succ={:?}",
        res.found.map(|h| tree.key_at(h).unwrap().0),
        res.pred.map(|h| tree.key_at(h).unwrap().0),
        res.succ.map(|h| tree.key_at(h).unwrap().0),
    );

    // Updates are handle-local: insert next to a known neighbor, delete by
    // handle. The rebalance counter tracks structural work.
    let before = tree.rebalance_steps();
    let h63 = tree.insert_near(res.pred.unwrap(), Key(63)).unwrap();
    println!(
        "inserted 63 next to its predecessor ({} rebalance steps)",
        tree.rebalance_steps() - before
    );
    tree.delete(h63).unwrap();
    println!("deleted it again; size back to {}", tree.size());
    assert!(tree.check_structure().is_empty());
}

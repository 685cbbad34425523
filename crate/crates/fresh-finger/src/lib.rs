//! A dictionary over a static integer key space whose search cost tracks
//! *recency-relative* key distance: an access is cheap when the key is close
//! to something accessed recently, with closeness measured by rank distance
//! among recently accessed keys, even if the two are far apart in the full
//! key space.
//!
//! The core structure ([`hierarchy::FreshFingerDict`]) is a tower of finger
//! search trees whose capacities grow doubly exponentially (4, 16, 256, ...,
//! n), each paired with a FIFO eviction queue. A search dovetails down the
//! tower from the predecessor/successor fingers found at the previous level;
//! after the key is found it is inserted into every smaller tree and the
//! oldest keys are evicted. Three eviction policies are provided, because
//! plain FIFO can evict a key from a level while it is still resident below
//! it; the default skip-and-requeue policy repairs that.
//!
//! Everything is instrumented: trees count key comparisons, accesses report
//! per-phase costs, and the [`oracle`] recomputes the bound quantities
//! (working-set numbers, working sets, rank distances, chosen fingers) from
//! first principles so the [`harness`] can audit measured costs against the
//! per-access bound on any workload.
//!
//! ## Examples
//!
//! Each capability has a runnable example:
//!
//! ```text
//! examples/
//! ├── finger_tree_tour.rs        # the substrate: finger + dovetail searches, handle updates
//! ├── dictionary_access.rs       # per-phase access costs, working-set locality
//! ├── oracle_walkthrough.rs      # bound quantities on a worked 16-key history
//! ├── impossibility_sequence.rs  # why rank distance lives in the squared working set
//! ├── generate_workloads.rs      # write the benchmark sequence files
//! ├── policy_showdown.rs         # strict FIFO vs skip-requeue vs full refresh
//! ├── bound_audit.rs             # fit measured comparisons against the bound
//! └── baseline_faceoff.rs        # the tower vs binary search vs a splay tree
//! ```
//!
//! ```bash
//! cargo run -p fresh-finger --example dictionary_access
//! cargo run -p fresh-finger --example baseline_faceoff
//! ```
//!
//! ## Quick start
//!
//! ```
//! use fresh_finger::hierarchy::{EvictionPolicy, FreshFingerDict};
//! use fresh_finger::Key;
//!
//! let mut dict = FreshFingerDict::new(1 << 10, EvictionPolicy::SkipRequeue)?;
//! dict.access(Key(700))?;
//! let again = dict.access(Key(700))?;
//! assert_eq!(again.found_level, 1);       // hot keys live in the tiny tree
//! assert!(again.cmp_total <= 3);
//! # Ok::<(), fresh_finger::hierarchy::DictError>(())
//! ```
//!
//! The `ffdict` binary drives the same machinery from the command line
//! (`gen`, `run`, `audit`, `compare`); see the README for the file formats.

pub mod baselines;
pub mod counter;
pub mod finger_tree;
pub mod harness;
pub mod hierarchy;
pub mod key;
pub mod oracle;
pub mod sequences;

pub use counter::ComparisonCounter;
pub use finger_tree::{FingerTree, NodeHandle, SearchResult, TreeError};
pub use key::Key;

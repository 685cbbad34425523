//! Comparison-counted reference dictionaries: binary search on a sorted
//! array and a bottom-up splay tree. Both store the full key space `1..=n`
//! and count key comparisons under the same rules as the finger tree.

use std::cmp::Ordering;

use thiserror::Error;

use crate::counter::ComparisonCounter;
use crate::key::Key;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaselineError {
    #[error("key {0} outside [1, {1}]")]
    OutOfRange(Key, u64),
}

/// Binary search over the sorted key array; at most `ceil(log2 n) + 1`
/// comparisons per access.
#[derive(Debug)]
pub struct StaticBst {
    keys: Vec<Key>,
    comparisons: ComparisonCounter,
}

impl StaticBst {
    pub fn new(n: u64) -> Self {
        StaticBst {
            keys: (1..=n).map(Key).collect(),
            comparisons: ComparisonCounter::new(),
        }
    }

    pub fn n(&self) -> u64 {
        self.keys.len() as u64
    }

    pub fn comparisons(&self) -> u64 {
        self.comparisons.count()
    }

    /// Locates `x`, returning the comparisons spent by this access.
    pub fn access(&mut self, x: Key) -> Result<u64, BaselineError> {
        if x.0 < 1 || x.0 > self.n() {
            return Err(BaselineError::OutOfRange(x, self.n()));
        }
        let before = self.comparisons.count();
        let mut lo = 0usize;
        let mut hi = self.keys.len();
        loop {
            debug_assert!(lo < hi);
            let mid = (lo + hi) / 2;
            self.comparisons.bump();
            match x.cmp(&self.keys[mid]) {
                Ordering::Equal => return Ok(self.comparisons.since(before)),
                Ordering::Less => hi = mid,
                Ordering::Greater => lo = mid + 1,
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct SplayNode {
    key: Key,
    left: Option<u32>,
    right: Option<u32>,
    parent: Option<u32>,
}

/// Self-adjusting binary search tree over `1..=n` with bottom-up splaying.
/// Comparisons are counted on the descent; rotations are free.
#[derive(Debug)]
pub struct SplayTree {
    nodes: Vec<SplayNode>,
    root: Option<u32>,
    comparisons: ComparisonCounter,
}

impl SplayTree {
    pub fn new(n: u64) -> Self {
        let mut tree = SplayTree {
            nodes: (1..=n)
                .map(|k| SplayNode {
                    key: Key(k),
                    left: None,
                    right: None,
                    parent: None,
                })
                .collect(),
            root: None,
            comparisons: ComparisonCounter::new(),
        };
        if n > 0 {
            tree.root = Some(tree.build_balanced(0, n as usize, None));
        }
        tree
    }

    fn build_balanced(&mut self, lo: usize, hi: usize, parent: Option<u32>) -> u32 {
        let mid = (lo + hi) / 2;
        let id = mid as u32;
        self.nodes[mid].parent = parent;
        self.nodes[mid].left = (lo < mid).then(|| self.build_balanced(lo, mid, Some(id)));
        self.nodes[mid].right = (mid + 1 < hi).then(|| self.build_balanced(mid + 1, hi, Some(id)));
        id
    }

    pub fn n(&self) -> u64 {
        self.nodes.len() as u64
    }

    pub fn comparisons(&self) -> u64 {
        self.comparisons.count()
    }

    /// Locates `x`, splays it to the root, and returns the comparisons spent.
    pub fn access(&mut self, x: Key) -> Result<u64, BaselineError> {
        if x.0 < 1 || x.0 > self.n() {
            return Err(BaselineError::OutOfRange(x, self.n()));
        }
        let before = self.comparisons.count();
        let mut cur = self.root.expect("non-empty tree");
        loop {
            self.comparisons.bump();
            match x.cmp(&self.nodes[cur as usize].key) {
                Ordering::Equal => break,
                Ordering::Less => cur = self.nodes[cur as usize].left.expect("key present"),
                Ordering::Greater => cur = self.nodes[cur as usize].right.expect("key present"),
            }
        }
        self.splay(cur);
        Ok(self.comparisons.since(before))
    }

    pub fn in_order(&self) -> Vec<Key> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur.is_some() || !stack.is_empty() {
            while let Some(id) = cur {
                stack.push(id);
                cur = self.nodes[id as usize].left;
            }
            let id = stack.pop().unwrap();
            out.push(self.nodes[id as usize].key);
            cur = self.nodes[id as usize].right;
        }
        out
    }

    fn splay(&mut self, x: u32) {
        while let Some(p) = self.nodes[x as usize].parent {
            match self.nodes[p as usize].parent {
                None => self.rotate_up(x), // zig
                Some(g) => {
                    let x_left = self.nodes[p as usize].left == Some(x);
                    let p_left = self.nodes[g as usize].left == Some(p);
                    if x_left == p_left {
                        // zig-zig: rotate parent first
                        self.rotate_up(p);
                        self.rotate_up(x);
                    } else {
                        // zig-zag
                        self.rotate_up(x);
                        self.rotate_up(x);
                    }
                }
            }
        }
    }

    fn rotate_up(&mut self, x: u32) {
        let p = self.nodes[x as usize].parent.expect("rotate at root");
        let g = self.nodes[p as usize].parent;
        let xi = x as usize;
        let pi = p as usize;
        if self.nodes[pi].left == Some(x) {
            let b = self.nodes[xi].right;
            self.nodes[pi].left = b;
            if let Some(b) = b {
                self.nodes[b as usize].parent = Some(p);
            }
            self.nodes[xi].right = Some(p);
        } else {
            let b = self.nodes[xi].left;
            self.nodes[pi].right = b;
            if let Some(b) = b {
                self.nodes[b as usize].parent = Some(p);
            }
            self.nodes[xi].left = Some(p);
        }
        self.nodes[pi].parent = Some(x);
        self.nodes[xi].parent = g;
        match g {
            None => self.root = Some(x),
            Some(g) => {
                let gi = g as usize;
                if self.nodes[gi].left == Some(p) {
                    self.nodes[gi].left = Some(x);
                } else {
                    self.nodes[gi].right = Some(x);
                }
            }
        }
    }
}

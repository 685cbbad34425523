//! Level-linked 2-4 tree with handle-based finger search.
//!
//! Every key lives in its own leaf; internal nodes hold 2..=4 children plus
//! the maximum key of their subtree. Nodes at the same height are chained
//! left-to-right, which lets a search climb from a finger leaf until the
//! current node or its level neighbor covers the target, then descend. The
//! comparison cost of a finger search is O(log d) in the rank distance d
//! between finger and target.
//!
//! Searches are driven by a resumable probe that performs at most one
//! key comparison per step, so two probes can be dovetailed in strict
//! alternation and the loser abandoned as soon as the winner finishes.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrder};

use thiserror::Error;

use crate::counter::ComparisonCounter;
use crate::key::Key;

/// Trees this small are searched by walking the leaf chain; the climb/descend
/// machinery only pays for itself once there is real height.
const LINEAR_CUTOFF: usize = 8;

static NEXT_TAG: AtomicU32 = AtomicU32::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("handle is stale or belongs to a different tree")]
    StaleHandle,
    #[error("tree is empty")]
    EmptyTree,
    #[error("tree is not empty")]
    NotEmpty,
    #[error("key {0} is already present")]
    DuplicateKey(Key),
    #[error("finger is not adjacent to the key's position")]
    NotAdjacent,
    #[error("build input must be strictly increasing")]
    UnsortedBuild,
}

/// Stable reference to a resident key. Valid until that key is deleted from
/// the tree it was issued by; dereferencing always yields the original key.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct NodeHandle {
    tag: u32,
    index: u32,
    generation: u32,
}

/// Result of a finger or dovetail search.
#[derive(Clone, Copy, Debug)]
pub struct SearchResult {
    pub found: Option<NodeHandle>,
    pub pred: Option<NodeHandle>,
    pub succ: Option<NodeHandle>,
    /// Key comparisons performed by this call.
    pub comparisons: u64,
}

#[derive(Clone, Copy, Debug)]
struct Children {
    ids: [u32; 5],
    len: u8,
}

impl Children {
    fn from_slice(kids: &[u32]) -> Self {
        let mut ids = [0u32; 5];
        ids[..kids.len()].copy_from_slice(kids);
        Children {
            ids,
            len: kids.len() as u8,
        }
    }

    fn len(&self) -> usize {
        self.len as usize
    }

    fn slice(&self) -> &[u32] {
        &self.ids[..self.len as usize]
    }

    fn pos_of(&self, id: u32) -> usize {
        self.slice()
            .iter()
            .position(|&c| c == id)
            .expect("child not under its parent")
    }

    fn insert(&mut self, pos: usize, id: u32) {
        debug_assert!(self.len < 5);
        let len = self.len as usize;
        self.ids.copy_within(pos..len, pos + 1);
        self.ids[pos] = id;
        self.len += 1;
    }

    fn remove(&mut self, pos: usize) -> u32 {
        let len = self.len as usize;
        let id = self.ids[pos];
        self.ids.copy_within(pos + 1..len, pos);
        self.len -= 1;
        id
    }

    fn last(&self) -> u32 {
        self.ids[self.len as usize - 1]
    }
}

#[derive(Clone, Debug)]
enum NodeKind {
    Leaf(Key),
    Internal(Children),
}

#[derive(Clone, Debug)]
struct Node {
    parent: Option<u32>,
    prev: Option<u32>,
    next: Option<u32>,
    max: Key,
    kind: NodeKind,
}

#[derive(Debug)]
struct Slot {
    generation: u32,
    node: Option<Node>,
}

/// Ordered set of distinct keys with finger searches and handle-local updates.
#[derive(Debug)]
pub struct FingerTree {
    tag: u32,
    slots: Vec<Slot>,
    free: Vec<u32>,
    root: Option<u32>,
    size: usize,
    min_leaf: Option<u32>,
    max_leaf: Option<u32>,
    comparisons: ComparisonCounter,
    rebalance_steps: u64,
}

impl Default for FingerTree {
    fn default() -> Self {
        Self::new()
    }
}

impl FingerTree {
    pub fn new() -> Self {
        FingerTree {
            tag: NEXT_TAG.fetch_add(1, AtomicOrder::Relaxed),
            slots: Vec::new(),
            free: Vec::new(),
            root: None,
            size: 0,
            min_leaf: None,
            max_leaf: None,
            comparisons: ComparisonCounter::new(),
            rebalance_steps: 0,
        }
    }

    /// Builds a tree from strictly increasing keys. Parent fanout is kept at
    /// three where possible so a freshly built tree is cheap to update.
    pub fn build(keys: &[Key]) -> Result<Self, TreeError> {
        let mut tree = FingerTree::new();
        for pair in keys.windows(2) {
            if tree.cmp_counted(pair[0], pair[1]) != Ordering::Less {
                return Err(TreeError::UnsortedBuild);
            }
        }
        if keys.is_empty() {
            return Ok(tree);
        }
        let leaves: Vec<u32> = keys
            .iter()
            .map(|&k| {
                tree.alloc(Node {
                    parent: None,
                    prev: None,
                    next: None,
                    max: k,
                    kind: NodeKind::Leaf(k),
                })
            })
            .collect();
        tree.link_level(&leaves);
        tree.min_leaf = Some(leaves[0]);
        tree.max_leaf = Some(*leaves.last().unwrap());
        tree.size = leaves.len();

        let mut level = leaves;
        while level.len() > 1 {
            let mut parents = Vec::with_capacity(level.len() / 2 + 1);
            let mut idx = 0;
            for group in chunk_sizes(level.len()) {
                let kids = &level[idx..idx + group];
                idx += group;
                let max = tree.node(*kids.last().unwrap()).max;
                let parent = tree.alloc(Node {
                    parent: None,
                    prev: None,
                    next: None,
                    max,
                    kind: NodeKind::Internal(Children::from_slice(kids)),
                });
                for &k in kids {
                    tree.node_mut(k).parent = Some(parent);
                }
                parents.push(parent);
            }
            tree.link_level(&parents);
            level = parents;
        }
        tree.root = Some(level[0]);
        Ok(tree)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Cumulative key comparisons performed by this tree.
    pub fn comparisons(&self) -> u64 {
        self.comparisons.count()
    }

    /// Cumulative structural rebalancing steps (splits, borrows, fuses and
    /// root height changes).
    pub fn rebalance_steps(&self) -> u64 {
        self.rebalance_steps
    }

    /// A handle to some resident key; deterministically the tree minimum.
    pub fn any_handle(&self) -> Result<NodeHandle, TreeError> {
        self.min_leaf
            .map(|id| self.handle(id))
            .ok_or(TreeError::EmptyTree)
    }

    pub fn key_at(&self, handle: NodeHandle) -> Result<Key, TreeError> {
        let id = self.leaf_of(handle)?;
        Ok(self.leaf_key(id))
    }

    /// In-order traversal of `(key, handle)` pairs via the leaf chain.
    pub fn iter(&self) -> impl Iterator<Item = (Key, NodeHandle)> + '_ {
        InOrder {
            tree: self,
            cur: self.min_leaf,
        }
    }

    /// Searches for `target` starting from `finger`. If the target is
    /// resident, `found` holds its handle; otherwise `pred`/`succ` hold the
    /// in-tree neighbors of its position (absent at the extremes).
    pub fn finger_search(
        &self,
        finger: NodeHandle,
        target: Key,
    ) -> Result<SearchResult, TreeError> {
        let f = self.leaf_of(finger)?;
        let before = self.comparisons.count();
        let mut probe = Probe::new(self, f, target, None);
        let outcome = probe.run();
        Ok(self.finish(outcome, before))
    }

    /// Two finger searches advanced in strict comparison-by-comparison
    /// alternation; the first to finish wins and the other is abandoned.
    /// `finger_a` steps first, so it wins ties.
    pub fn dovetail_search(
        &self,
        finger_a: NodeHandle,
        finger_b: NodeHandle,
        target: Key,
    ) -> Result<SearchResult, TreeError> {
        let fa = self.leaf_of(finger_a)?;
        let fb = self.leaf_of(finger_b)?;
        let before = self.comparisons.count();
        let outcome = self.dovetail(fa, fb, target, None, None);
        Ok(self.finish(outcome, before))
    }

    /// Oriented single-finger search: the caller already knows how `target`
    /// compares to the finger key, so the orientation comparison is skipped.
    pub(crate) fn finger_search_oriented(
        &self,
        finger: NodeHandle,
        target: Key,
        relation: Ordering,
    ) -> Result<SearchResult, TreeError> {
        debug_assert_ne!(relation, Ordering::Equal);
        let f = self.leaf_of(finger)?;
        let before = self.comparisons.count();
        let mut probe = Probe::new(self, f, target, Some(relation));
        let outcome = probe.run();
        Ok(self.finish(outcome, before))
    }

    /// Dovetail where `pred` is known to sit below the target and `succ`
    /// above it; the pred-side probe steps first and wins ties.
    pub(crate) fn dovetail_bracketed(
        &self,
        pred: NodeHandle,
        succ: NodeHandle,
        target: Key,
    ) -> Result<SearchResult, TreeError> {
        let fa = self.leaf_of(pred)?;
        let fb = self.leaf_of(succ)?;
        let before = self.comparisons.count();
        let outcome = self.dovetail(
            fa,
            fb,
            target,
            Some(Ordering::Greater),
            Some(Ordering::Less),
        );
        Ok(self.finish(outcome, before))
    }

    fn dovetail(
        &self,
        fa: u32,
        fb: u32,
        target: Key,
        orient_a: Option<Ordering>,
        orient_b: Option<Ordering>,
    ) -> Outcome {
        let mut pa = Probe::new(self, fa, target, orient_a);
        let mut pb = Probe::new(self, fb, target, orient_b);
        loop {
            if let Some(out) = pa.step() {
                return out;
            }
            if let Some(out) = pb.step() {
                return out;
            }
        }
    }

    /// Inserts `key` next to `finger`, which must be its in-tree predecessor
    /// or successor. Costs one or two comparisons to validate adjacency plus
    /// O(1) amortized structural work.
    pub fn insert_near(&mut self, finger: NodeHandle, key: Key) -> Result<NodeHandle, TreeError> {
        let f = self.leaf_of(finger)?;
        let fk = self.leaf_key(f);
        match self.cmp_counted(key, fk) {
            Ordering::Equal => Err(TreeError::DuplicateKey(key)),
            Ordering::Greater => match self.node(f).next {
                None => Ok(self.attach_leaf(Some(f), None, key)),
                Some(s) => match self.cmp_counted(key, self.leaf_key(s)) {
                    Ordering::Equal => Err(TreeError::DuplicateKey(key)),
                    Ordering::Greater => Err(TreeError::NotAdjacent),
                    Ordering::Less => Ok(self.attach_leaf(Some(f), Some(s), key)),
                },
            },
            Ordering::Less => match self.node(f).prev {
                None => Ok(self.attach_leaf(None, Some(f), key)),
                Some(p) => match self.cmp_counted(key, self.leaf_key(p)) {
                    Ordering::Equal => Err(TreeError::DuplicateKey(key)),
                    Ordering::Less => Err(TreeError::NotAdjacent),
                    Ordering::Greater => Ok(self.attach_leaf(Some(p), Some(f), key)),
                },
            },
        }
    }

    /// Entry point for inserting into an empty tree.
    pub fn insert_first(&mut self, key: Key) -> Result<NodeHandle, TreeError> {
        if self.root.is_some() {
            return Err(TreeError::NotEmpty);
        }
        let leaf = self.alloc(Node {
            parent: None,
            prev: None,
            next: None,
            max: key,
            kind: NodeKind::Leaf(key),
        });
        self.root = Some(leaf);
        self.min_leaf = Some(leaf);
        self.max_leaf = Some(leaf);
        self.size = 1;
        Ok(self.handle(leaf))
    }

    /// Comparison-free insert between two handles that a prior search on this
    /// tree proved adjacent to `key`'s position. `pred`/`succ` must be linked
    /// neighbors (or the matching extreme); the key order itself is trusted.
    pub(crate) fn insert_adjacent(
        &mut self,
        pred: Option<NodeHandle>,
        succ: Option<NodeHandle>,
        key: Key,
    ) -> Result<NodeHandle, TreeError> {
        let p = pred.map(|h| self.leaf_of(h)).transpose()?;
        let s = succ.map(|h| self.leaf_of(h)).transpose()?;
        match (p, s) {
            (None, None) => self.insert_first(key),
            (Some(p), s) => {
                if self.node(p).next != s {
                    return Err(TreeError::NotAdjacent);
                }
                Ok(self.attach_leaf(Some(p), s, key))
            }
            (None, Some(s)) => {
                if self.node(s).prev.is_some() {
                    return Err(TreeError::NotAdjacent);
                }
                Ok(self.attach_leaf(None, Some(s), key))
            }
        }
    }

    /// Removes the key behind `handle` and invalidates it.
    pub fn delete(&mut self, handle: NodeHandle) -> Result<Key, TreeError> {
        let w = self.leaf_of(handle)?;
        let key = self.leaf_key(w);
        let prev = self.node(w).prev;
        let next = self.node(w).next;
        match prev {
            Some(p) => self.node_mut(p).next = next,
            None => self.min_leaf = next,
        }
        match next {
            Some(n) => self.node_mut(n).prev = prev,
            None => self.max_leaf = prev,
        }
        let parent = self.node(w).parent;
        self.release(w);
        self.size -= 1;
        match parent {
            None => {
                self.root = None;
            }
            Some(par) => {
                let mut ch = self.children(par);
                let pos = ch.pos_of(w);
                ch.remove(pos);
                self.set_children(par, ch);
                self.refresh_max_upward(par);
                self.fix_underflow(par);
            }
        }
        Ok(key)
    }

    /// Structural self-audit; returns human-readable violations (empty = ok).
    pub fn check_structure(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let root = match self.root {
            None => {
                if self.size != 0 {
                    bad.push(format!("empty root but size {}", self.size));
                }
                if self.min_leaf.is_some() || self.max_leaf.is_some() {
                    bad.push("empty root but cached extremes present".into());
                }
                return bad;
            }
            Some(r) => r,
        };
        if self.node(root).parent.is_some() {
            bad.push("root has a parent".into());
        }
        // Depth-first walk collecting nodes per depth in left-to-right order.
        let mut by_depth: Vec<Vec<u32>> = Vec::new();
        let mut stack = vec![(root, 0usize)];
        let mut leaf_depth: Option<usize> = None;
        while let Some((id, depth)) = stack.pop() {
            if by_depth.len() <= depth {
                by_depth.resize_with(depth + 1, Vec::new);
            }
            by_depth[depth].push(id);
            match &self.node(id).kind {
                NodeKind::Leaf(k) => {
                    if self.node(id).max != *k {
                        bad.push(format!("leaf {k} has max {}", self.node(id).max));
                    }
                    match leaf_depth {
                        None => leaf_depth = Some(depth),
                        Some(d) if d != depth => {
                            bad.push(format!("leaf {k} at depth {depth}, expected {d}"))
                        }
                        _ => {}
                    }
                }
                NodeKind::Internal(ch) => {
                    if ch.len() < 2 || ch.len() > 4 {
                        bad.push(format!("internal node with {} children", ch.len()));
                    }
                    let want = self.node(ch.last()).max;
                    if self.node(id).max != want {
                        bad.push(format!(
                            "internal max {} differs from last child max {want}",
                            self.node(id).max
                        ));
                    }
                    for &c in ch.slice() {
                        if self.node(c).parent != Some(id) {
                            bad.push("child with wrong parent pointer".into());
                        }
                    }
                    // Push children right-to-left so they pop left-to-right.
                    for &c in ch.slice().iter().rev() {
                        stack.push((c, depth + 1));
                    }
                }
            }
        }
        // Level links must chain each depth in order.
        for level in &by_depth {
            for (i, &id) in level.iter().enumerate() {
                let want_prev = if i == 0 { None } else { Some(level[i - 1]) };
                let want_next = level.get(i + 1).copied();
                if self.node(id).prev != want_prev || self.node(id).next != want_next {
                    bad.push("level links out of order".into());
                }
            }
        }
        let leaves = by_depth.last().cloned().unwrap_or_default();
        if leaves.len() != self.size {
            bad.push(format!(
                "size {} but {} leaves reachable",
                self.size,
                leaves.len()
            ));
        }
        for pair in leaves.windows(2) {
            if self.leaf_key(pair[0]) >= self.leaf_key(pair[1]) {
                bad.push("leaf keys not strictly increasing".into());
            }
        }
        if self.min_leaf != leaves.first().copied() || self.max_leaf != leaves.last().copied() {
            bad.push("cached extreme leaves are wrong".into());
        }
        bad
    }

    // ---- internals ----

    #[inline]
    fn cmp_counted(&self, a: Key, b: Key) -> Ordering {
        self.comparisons.bump();
        a.cmp(&b)
    }

    fn node(&self, id: u32) -> &Node {
        self.slots[id as usize].node.as_ref().expect("vacant slot")
    }

    fn node_mut(&mut self, id: u32) -> &mut Node {
        self.slots[id as usize].node.as_mut().expect("vacant slot")
    }

    fn leaf_key(&self, id: u32) -> Key {
        match &self.node(id).kind {
            NodeKind::Leaf(k) => *k,
            NodeKind::Internal(_) => unreachable!("expected leaf"),
        }
    }

    fn children(&self, id: u32) -> Children {
        match &self.node(id).kind {
            NodeKind::Internal(ch) => *ch,
            NodeKind::Leaf(_) => unreachable!("expected internal node"),
        }
    }

    fn set_children(&mut self, id: u32, ch: Children) {
        self.node_mut(id).kind = NodeKind::Internal(ch);
    }

    fn handle(&self, id: u32) -> NodeHandle {
        NodeHandle {
            tag: self.tag,
            index: id,
            generation: self.slots[id as usize].generation,
        }
    }

    fn leaf_of(&self, h: NodeHandle) -> Result<u32, TreeError> {
        if h.tag != self.tag {
            return Err(TreeError::StaleHandle);
        }
        let slot = self
            .slots
            .get(h.index as usize)
            .ok_or(TreeError::StaleHandle)?;
        if slot.generation != h.generation {
            return Err(TreeError::StaleHandle);
        }
        match &slot.node {
            Some(Node {
                kind: NodeKind::Leaf(_),
                ..
            }) => Ok(h.index),
            _ => Err(TreeError::StaleHandle),
        }
    }

    fn alloc(&mut self, node: Node) -> u32 {
        if let Some(id) = self.free.pop() {
            self.slots[id as usize].node = Some(node);
            id
        } else {
            self.slots.push(Slot {
                generation: 0,
                node: Some(node),
            });
            (self.slots.len() - 1) as u32
        }
    }

    fn release(&mut self, id: u32) {
        let slot = &mut self.slots[id as usize];
        slot.node = None;
        slot.generation = slot.generation.wrapping_add(1);
        self.free.push(id);
    }

    fn link_level(&mut self, level: &[u32]) {
        for pair in level.windows(2) {
            self.node_mut(pair[0]).next = Some(pair[1]);
            self.node_mut(pair[1]).prev = Some(pair[0]);
        }
    }

    /// Recomputes the cached subtree max from the last child; true if changed.
    fn recompute_max(&mut self, id: u32) -> bool {
        let want = match &self.node(id).kind {
            NodeKind::Leaf(k) => *k,
            NodeKind::Internal(ch) => self.node(ch.last()).max,
        };
        if self.node(id).max.0 == want.0 {
            false
        } else {
            self.node_mut(id).max = want;
            true
        }
    }

    fn refresh_max_upward(&mut self, mut id: u32) {
        loop {
            if !self.recompute_max(id) {
                break;
            }
            match self.node(id).parent {
                Some(p) => id = p,
                None => break,
            }
        }
    }

    fn attach_leaf(&mut self, pred: Option<u32>, succ: Option<u32>, key: Key) -> NodeHandle {
        let leaf = self.alloc(Node {
            parent: None,
            prev: pred,
            next: succ,
            max: key,
            kind: NodeKind::Leaf(key),
        });
        match pred {
            Some(p) => self.node_mut(p).next = Some(leaf),
            None => self.min_leaf = Some(leaf),
        }
        match succ {
            Some(s) => self.node_mut(s).prev = Some(leaf),
            None => self.max_leaf = Some(leaf),
        }
        let (anchor, to_right) = match (pred, succ) {
            (Some(p), _) => (p, true),
            (None, Some(s)) => (s, false),
            (None, None) => unreachable!("attach_leaf on empty tree"),
        };
        match self.node(anchor).parent {
            None => {
                // The anchor is a root leaf; grow a root above both.
                let kids = if to_right {
                    [anchor, leaf]
                } else {
                    [leaf, anchor]
                };
                let max = self.node(kids[1]).max;
                let root = self.alloc(Node {
                    parent: None,
                    prev: None,
                    next: None,
                    max,
                    kind: NodeKind::Internal(Children::from_slice(&kids)),
                });
                self.node_mut(kids[0]).parent = Some(root);
                self.node_mut(kids[1]).parent = Some(root);
                self.root = Some(root);
                self.rebalance_steps += 1;
            }
            Some(par) => {
                let mut ch = self.children(par);
                let pos = ch.pos_of(anchor);
                let at = if to_right { pos + 1 } else { pos };
                ch.insert(at, leaf);
                self.set_children(par, ch);
                self.node_mut(leaf).parent = Some(par);
                self.refresh_max_upward(par);
                self.fix_overflow(par);
            }
        }
        self.size += 1;
        self.handle(leaf)
    }

    fn fix_overflow(&mut self, mut v: u32) {
        loop {
            let ch = self.children(v);
            if ch.len() < 5 {
                break;
            }
            // Split 5 children into 3 (kept by v) + 2 (new right sibling).
            let old_max = self.node(v).max;
            let right_kids = [ch.ids[3], ch.ids[4]];
            let mut left = ch;
            left.len = 3;
            let right = self.alloc(Node {
                parent: self.node(v).parent,
                prev: Some(v),
                next: self.node(v).next,
                max: old_max,
                kind: NodeKind::Internal(Children::from_slice(&right_kids)),
            });
            for k in right_kids {
                self.node_mut(k).parent = Some(right);
            }
            if let Some(nx) = self.node(v).next {
                self.node_mut(nx).prev = Some(right);
            }
            self.node_mut(v).next = Some(right);
            self.set_children(v, left);
            self.recompute_max(v);
            self.rebalance_steps += 1;
            match self.node(v).parent {
                None => {
                    let max = self.node(right).max;
                    let root = self.alloc(Node {
                        parent: None,
                        prev: None,
                        next: None,
                        max,
                        kind: NodeKind::Internal(Children::from_slice(&[v, right])),
                    });
                    self.node_mut(v).parent = Some(root);
                    self.node_mut(right).parent = Some(root);
                    self.root = Some(root);
                    self.rebalance_steps += 1;
                    break;
                }
                Some(par) => {
                    let mut pch = self.children(par);
                    let pos = pch.pos_of(v);
                    pch.insert(pos + 1, right);
                    self.set_children(par, pch);
                    // Coverage of par is unchanged, so its max is too.
                    v = par;
                }
            }
        }
    }

    fn fix_underflow(&mut self, mut v: u32) {
        loop {
            if self.children(v).len() >= 2 {
                break;
            }
            let par = match self.node(v).parent {
                None => break, // root; collapsed below
                Some(p) => p,
            };
            let pch = self.children(par);
            let pos = pch.pos_of(v);
            if pos > 0 {
                let left = pch.ids[pos - 1];
                if self.children(left).len() >= 3 {
                    // Borrow the left sibling's last child.
                    let mut lch = self.children(left);
                    let moved = lch.remove(lch.len() - 1);
                    self.set_children(left, lch);
                    let mut vch = self.children(v);
                    vch.insert(0, moved);
                    self.set_children(v, vch);
                    self.node_mut(moved).parent = Some(v);
                    self.refresh_max_upward(left);
                    self.rebalance_steps += 1;
                    break;
                }
                // Fuse v's only child onto the left sibling.
                let only = self.children(v).ids[0];
                let mut lch = self.children(left);
                lch.insert(lch.len(), only);
                self.set_children(left, lch);
                self.node_mut(only).parent = Some(left);
                self.unlink_level(v);
                let mut pch = self.children(par);
                pch.remove(pch.pos_of(v));
                self.set_children(par, pch);
                self.release(v);
                self.refresh_max_upward(left);
                self.rebalance_steps += 1;
                v = par;
            } else {
                let right = pch.ids[1];
                if self.children(right).len() >= 3 {
                    // Borrow the right sibling's first child.
                    let mut rch = self.children(right);
                    let moved = rch.remove(0);
                    self.set_children(right, rch);
                    let mut vch = self.children(v);
                    vch.insert(vch.len(), moved);
                    self.set_children(v, vch);
                    self.node_mut(moved).parent = Some(v);
                    self.refresh_max_upward(v);
                    self.rebalance_steps += 1;
                    break;
                }
                // Fuse v's only child onto the right sibling's front.
                let only = self.children(v).ids[0];
                let mut rch = self.children(right);
                rch.insert(0, only);
                self.set_children(right, rch);
                self.node_mut(only).parent = Some(right);
                self.unlink_level(v);
                let mut pch = self.children(par);
                pch.remove(pch.pos_of(v));
                self.set_children(par, pch);
                self.release(v);
                self.rebalance_steps += 1;
                v = par;
            }
        }
        // Collapse a single-child root chain.
        while let Some(r) = self.root {
            match &self.node(r).kind {
                NodeKind::Internal(ch) if ch.len() == 1 => {
                    let child = ch.ids[0];
                    self.node_mut(child).parent = None;
                    self.release(r);
                    self.root = Some(child);
                    self.rebalance_steps += 1;
                }
                _ => break,
            }
        }
    }

    fn unlink_level(&mut self, v: u32) {
        let prev = self.node(v).prev;
        let next = self.node(v).next;
        if let Some(p) = prev {
            self.node_mut(p).next = next;
        }
        if let Some(n) = next {
            self.node_mut(n).prev = prev;
        }
    }

    fn finish(&self, outcome: Outcome, before: u64) -> SearchResult {
        let comparisons = self.comparisons.since(before);
        match outcome {
            Outcome::Found(id) => SearchResult {
                found: Some(self.handle(id)),
                pred: None,
                succ: None,
                comparisons,
            },
            Outcome::Missing { pred, succ } => SearchResult {
                found: None,
                pred: pred.map(|id| self.handle(id)),
                succ: succ.map(|id| self.handle(id)),
                comparisons,
            },
        }
    }
}

fn chunk_sizes(n: usize) -> Vec<usize> {
    debug_assert!(n >= 2);
    match n % 3 {
        0 => vec![3; n / 3],
        1 => {
            // Avoid a trailing group of one: ... 3, 2, 2.
            let mut v = vec![3; (n - 4) / 3];
            v.push(2);
            v.push(2);
            v
        }
        _ => {
            let mut v = vec![3; n / 3];
            v.push(2);
            v
        }
    }
}

struct InOrder<'a> {
    tree: &'a FingerTree,
    cur: Option<u32>,
}

impl Iterator for InOrder<'_> {
    type Item = (Key, NodeHandle);

    fn next(&mut self) -> Option<Self::Item> {
        let id = self.cur?;
        self.cur = self.tree.node(id).next;
        Some((self.tree.leaf_key(id), self.tree.handle(id)))
    }
}

enum Outcome {
    Found(u32),
    Missing {
        pred: Option<u32>,
        succ: Option<u32>,
    },
}

enum ProbeState {
    /// Compare target against the finger key to pick a direction.
    Orient(u32),
    /// Walk the leaf chain rightward; invariant key(cur) < target.
    LinearRight(u32),
    /// Walk the leaf chain leftward; invariant key(cur) > target.
    LinearLeft(u32),
    /// Right climb, checking the node itself; invariant min(v) <= target.
    RightSelf(u32),
    /// Right climb, checking the level neighbor; invariant target > max(v).
    RightNeighbor(u32),
    /// Left climb; invariant target <= max(v), with the ordering recorded.
    LeftNeighbor(u32, Ordering),
    /// Left climb, second neighbor check before ascending.
    LeftNeighbor2 {
        v: u32,
        w: u32,
        known_w: Ordering,
    },
    /// Walking down inside a covering node; `known` is the ordering of the
    /// target against the node's max, inherited by its last child.
    Descend {
        node: u32,
        child: u8,
        known: Ordering,
    },
    Done,
}

/// Resumable finger search performing at most one key comparison per step.
struct Probe<'a> {
    tree: &'a FingerTree,
    target: Key,
    state: ProbeState,
}

enum Entered {
    Deeper,
    Finished(Outcome),
}

impl<'a> Probe<'a> {
    fn new(tree: &'a FingerTree, finger: u32, target: Key, orientation: Option<Ordering>) -> Self {
        let linear = tree.size <= LINEAR_CUTOFF;
        let state = match orientation {
            None => ProbeState::Orient(finger),
            Some(Ordering::Greater) => {
                if linear {
                    ProbeState::LinearRight(finger)
                } else {
                    ProbeState::RightNeighbor(finger)
                }
            }
            Some(Ordering::Less) => {
                if linear {
                    ProbeState::LinearLeft(finger)
                } else {
                    ProbeState::LeftNeighbor(finger, Ordering::Less)
                }
            }
            Some(Ordering::Equal) => unreachable!("orientation must be strict"),
        };
        Probe {
            tree,
            target,
            state,
        }
    }

    fn run(&mut self) -> Outcome {
        loop {
            if let Some(out) = self.step() {
                return out;
            }
        }
    }

    /// Advances the search until it has performed one key comparison or
    /// finished. Returns the outcome once complete.
    fn step(&mut self) -> Option<Outcome> {
        loop {
            match self.state {
                ProbeState::Orient(f) => {
                    let o = self.tree.cmp_counted(self.target, self.tree.leaf_key(f));
                    let linear = self.tree.size <= LINEAR_CUTOFF;
                    match o {
                        Ordering::Equal => return self.done(Outcome::Found(f)),
                        Ordering::Greater => {
                            self.state = if linear {
                                ProbeState::LinearRight(f)
                            } else {
                                ProbeState::RightNeighbor(f)
                            };
                            return None;
                        }
                        Ordering::Less => {
                            self.state = if linear {
                                ProbeState::LinearLeft(f)
                            } else {
                                ProbeState::LeftNeighbor(f, Ordering::Less)
                            };
                            return None;
                        }
                    }
                }
                ProbeState::LinearRight(cur) => match self.tree.node(cur).next {
                    None => {
                        return self.done(Outcome::Missing {
                            pred: Some(cur),
                            succ: None,
                        })
                    }
                    Some(nx) => match self.tree.cmp_counted(self.target, self.tree.leaf_key(nx)) {
                        Ordering::Greater => {
                            self.state = ProbeState::LinearRight(nx);
                            return None;
                        }
                        Ordering::Equal => return self.done(Outcome::Found(nx)),
                        Ordering::Less => {
                            return self.done(Outcome::Missing {
                                pred: Some(cur),
                                succ: Some(nx),
                            })
                        }
                    },
                },
                ProbeState::LinearLeft(cur) => match self.tree.node(cur).prev {
                    None => {
                        return self.done(Outcome::Missing {
                            pred: None,
                            succ: Some(cur),
                        })
                    }
                    Some(pv) => match self.tree.cmp_counted(self.target, self.tree.leaf_key(pv)) {
                        Ordering::Less => {
                            self.state = ProbeState::LinearLeft(pv);
                            return None;
                        }
                        Ordering::Equal => return self.done(Outcome::Found(pv)),
                        Ordering::Greater => {
                            return self.done(Outcome::Missing {
                                pred: Some(pv),
                                succ: Some(cur),
                            })
                        }
                    },
                },
                ProbeState::RightSelf(v) => {
                    let o = self.tree.cmp_counted(self.target, self.tree.node(v).max);
                    if o == Ordering::Greater {
                        self.state = ProbeState::RightNeighbor(v);
                        return None;
                    }
                    match self.enter(v, o) {
                        Entered::Finished(out) => return self.done(out),
                        Entered::Deeper => return None,
                    }
                }
                ProbeState::RightNeighbor(v) => match self.tree.node(v).next {
                    None => {
                        // v is rightmost at its height, so target > tree max.
                        return self.done(Outcome::Missing {
                            pred: self.tree.max_leaf,
                            succ: None,
                        });
                    }
                    Some(w) => {
                        let o = self.tree.cmp_counted(self.target, self.tree.node(w).max);
                        if o == Ordering::Greater {
                            let p = self
                                .tree
                                .node(v)
                                .parent
                                .expect("level neighbor implies non-root");
                            self.state = ProbeState::RightSelf(p);
                            return None;
                        }
                        match self.enter(w, o) {
                            Entered::Finished(out) => return self.done(out),
                            Entered::Deeper => return None,
                        }
                    }
                },
                ProbeState::LeftNeighbor(v, known) => match self.tree.node(v).prev {
                    None => match self.enter(v, known) {
                        Entered::Finished(out) => return self.done(out),
                        Entered::Deeper => continue,
                    },
                    Some(w) => {
                        let o = self.tree.cmp_counted(self.target, self.tree.node(w).max);
                        if o == Ordering::Greater {
                            match self.enter(v, known) {
                                Entered::Finished(out) => return self.done(out),
                                Entered::Deeper => return None,
                            }
                        } else {
                            self.state = ProbeState::LeftNeighbor2 { v, w, known_w: o };
                            return None;
                        }
                    }
                },
                ProbeState::LeftNeighbor2 { v, w, known_w } => match self.tree.node(w).prev {
                    None => match self.enter(w, known_w) {
                        Entered::Finished(out) => return self.done(out),
                        Entered::Deeper => continue,
                    },
                    Some(u) => {
                        let o = self.tree.cmp_counted(self.target, self.tree.node(u).max);
                        if o == Ordering::Greater {
                            match self.enter(w, known_w) {
                                Entered::Finished(out) => return self.done(out),
                                Entered::Deeper => return None,
                            }
                        } else {
                            let p = self
                                .tree
                                .node(v)
                                .parent
                                .expect("level neighbor implies non-root");
                            self.state = ProbeState::LeftNeighbor(p, Ordering::Less);
                            return None;
                        }
                    }
                },
                ProbeState::Descend { node, child, known } => {
                    let ch = self.tree.children(node);
                    let m = ch.len();
                    if (child as usize) == m - 1 {
                        // Last child inherits the node's own max ordering.
                        match self.enter(ch.ids[m - 1], known) {
                            Entered::Finished(out) => return self.done(out),
                            Entered::Deeper => continue,
                        }
                    } else {
                        let c = ch.ids[child as usize];
                        let o = self.tree.cmp_counted(self.target, self.tree.node(c).max);
                        if o == Ordering::Greater {
                            self.state = ProbeState::Descend {
                                node,
                                child: child + 1,
                                known,
                            };
                            return None;
                        }
                        match self.enter(c, o) {
                            Entered::Finished(out) => return self.done(out),
                            Entered::Deeper => return None,
                        }
                    }
                }
                ProbeState::Done => unreachable!("stepped a finished probe"),
            }
        }
    }

    /// Moves into `id` knowing how the target compares to its max.
    fn enter(&mut self, id: u32, known: Ordering) -> Entered {
        match &self.tree.node(id).kind {
            NodeKind::Leaf(_) => Entered::Finished(match known {
                Ordering::Equal => Outcome::Found(id),
                Ordering::Less => Outcome::Missing {
                    pred: self.tree.node(id).prev,
                    succ: Some(id),
                },
                Ordering::Greater => unreachable!("descend overshot the target"),
            }),
            NodeKind::Internal(_) => {
                self.state = ProbeState::Descend {
                    node: id,
                    child: 0,
                    known,
                };
                Entered::Deeper
            }
        }
    }

    fn done(&mut self, out: Outcome) -> Option<Outcome> {
        self.state = ProbeState::Done;
        Some(out)
    }
}

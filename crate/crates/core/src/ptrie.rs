//! The PTrie priority queue.
//!
//! Keys are `M`-bit words split into `M/K` chunks of `K` bits, most
//! significant first. Each chunk indexes a slot of a layer; a slot is empty,
//! holds a leaf, or holds a deeper layer. Leaves are threaded into a doubly
//! linked list in ascending key order and each keeps a FIFO queue of the
//! payloads inserted under its key, which makes extraction stable.
//!
//! Every layer caches the leftmost and rightmost leaf of its subtree. Insert
//! uses them to find the list position of a new leaf from the layer's
//! ordered index set: after the rightmost leaf of the predecessor slot, or
//! before the leftmost leaf of the successor slot. Insert and remove each
//! make one pass from the root, so a call touches at most `M/K` layers and
//! performs at most one ordered index-set operation.

use std::cell::Cell;
use std::collections::hash_map::DefaultHasher;
use std::collections::VecDeque;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::config::PTrieConfig;
use crate::index_set::IndexSet;
use crate::stats::{OpKind, OpStats, StatsSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("key {key} does not fit in {word_bits} bits")]
pub struct KeyError {
    pub key: u64,
    pub word_bits: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct LeafId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct LayerId(u32);

const ROOT: LayerId = LayerId(0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Empty,
    Leaf(LeafId),
    Layer(LayerId),
}

#[derive(Debug, Clone)]
struct Layer {
    depth: u8,
    occupied: IndexSet,
    slots: Box<[Slot]>,
    min_leaf: Option<LeafId>,
    max_leaf: Option<LeafId>,
}

#[derive(Debug, Clone)]
struct LeafNode<T> {
    key: u64,
    queue: VecDeque<T>,
    prev: Option<LeafId>,
    next: Option<LeafId>,
}

/// Stable min/max priority queue over `M`-bit unsigned keys.
#[derive(Clone)]
pub struct PTrie<T> {
    config: PTrieConfig,
    layers: Vec<Layer>,
    /// Heads of subtrees cut loose by `remove`; each is a chain of
    /// single-slot layers, reclaimed one layer per allocation.
    detached: Vec<LayerId>,
    leaves: Vec<LeafNode<T>>,
    free_leaves: Vec<LeafId>,
    head: Option<LeafId>,
    tail: Option<LeafId>,
    len: usize,
    distinct: usize,
    last: Cell<OpStats>,
    totals: Cell<StatsSummary>,
}

impl<T> PTrie<T> {
    pub fn new(config: PTrieConfig) -> Self {
        let root = Layer {
            depth: 0,
            occupied: IndexSet::new(),
            slots: vec![Slot::Empty; config.degree()].into_boxed_slice(),
            min_leaf: None,
            max_leaf: None,
        };
        Self {
            config,
            layers: vec![root],
            detached: Vec::new(),
            leaves: Vec::new(),
            free_leaves: Vec::new(),
            head: None,
            tail: None,
            len: 0,
            distinct: 0,
            last: Cell::new(OpStats::default()),
            totals: Cell::new(StatsSummary::default()),
        }
    }

    pub fn config(&self) -> &PTrieConfig {
        &self.config
    }

    /// Number of stored payloads.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of leaves, i.e. distinct keys currently stored.
    pub fn distinct_keys(&self) -> usize {
        self.distinct
    }

    pub fn insert(&mut self, key: u64, payload: T) -> Result<(), KeyError> {
        if !self.config.contains(key) {
            return Err(KeyError {
                key,
                word_bits: self.config.word_bits(),
            });
        }
        let mut st = OpStats::default();
        let leaf = self.locate_or_create(key, &mut st);
        self.leaves[leaf.0 as usize].queue.push_back(payload);
        self.len += 1;
        self.finish(OpKind::Insert, st);
        Ok(())
    }

    /// Removes and returns the oldest payload stored under `key`.
    pub fn remove(&mut self, key: u64) -> Option<T> {
        let mut st = OpStats::default();
        let out = self.remove_inner(key, &mut st);
        if out.is_some() {
            self.len -= 1;
        }
        self.finish(OpKind::Remove, st);
        out
    }

    pub fn search(&self, key: u64) -> bool {
        let mut st = OpStats::default();
        let found = self.config.contains(key) && self.find_leaf(key, &mut st).is_some();
        self.finish(OpKind::Search, st);
        found
    }

    /// Smallest key and the oldest payload stored under it.
    pub fn minimum(&self) -> Option<(u64, &T)> {
        self.head.map(|id| {
            let leaf = self.leaf(id);
            (leaf.key, leaf.queue.front().expect("leaf queues are never empty"))
        })
    }

    /// Largest key and the oldest payload stored under it.
    pub fn maximum(&self) -> Option<(u64, &T)> {
        self.tail.map(|id| {
            let leaf = self.leaf(id);
            (leaf.key, leaf.queue.front().expect("leaf queues are never empty"))
        })
    }

    /// `remove(minimum())`.
    pub fn delete_min(&mut self) -> Option<(u64, T)> {
        let key = self.leaf(self.head?).key;
        self.remove(key).map(|p| (key, p))
    }

    /// `remove(maximum())`.
    pub fn delete_max(&mut self) -> Option<(u64, T)> {
        let key = self.leaf(self.tail?).key;
        self.remove(key).map(|p| (key, p))
    }

    pub fn first(&self) -> Option<LeafRef<'_, T>> {
        self.head.map(|id| LeafRef { trie: self, id })
    }

    pub fn last(&self) -> Option<LeafRef<'_, T>> {
        self.tail.map(|id| LeafRef { trie: self, id })
    }

    /// All `(key, payload)` pairs in extraction order: ascending key, oldest
    /// payload first within a key.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &T)> + '_ {
        let mut cursor = self.first();
        std::iter::from_fn(move || {
            let leaf = cursor.take()?;
            cursor = leaf.next();
            Some(leaf)
        })
        .flat_map(|leaf| {
            let key = leaf.key();
            leaf.payloads().map(move |p| (key, p))
        })
    }

    /// Counters of the most recent insert, remove or search.
    pub fn last_op_stats(&self) -> OpStats {
        self.last.get()
    }

    pub fn stats_summary(&self) -> StatsSummary {
        self.totals.get()
    }

    pub fn reset_stats(&self) {
        self.last.set(OpStats::default());
        self.totals.set(StatsSummary::default());
    }

    /// Live layer count per depth, root at index 0.
    pub fn layers_per_depth(&self) -> Vec<usize> {
        let mut counts = vec![0; self.config.depth_max()];
        let mut stack = vec![ROOT];
        while let Some(id) = stack.pop() {
            let layer = &self.layers[id.0 as usize];
            counts[layer.depth as usize] += 1;
            for i in layer.occupied.iter() {
                if let Slot::Layer(child) = layer.slots[i] {
                    stack.push(child);
                }
            }
        }
        counts
    }

    /// Slots held by live layers, the dominant memory term.
    pub fn live_slots(&self) -> usize {
        self.layers_per_depth().iter().sum::<usize>() * self.config.degree()
    }

    fn finish(&self, kind: OpKind, st: OpStats) {
        self.last.set(st);
        let mut totals = self.totals.get();
        totals.record(kind, &st, self.config.stride_bits());
        self.totals.set(totals);
    }

    #[inline]
    fn leaf(&self, id: LeafId) -> &LeafNode<T> {
        &self.leaves[id.0 as usize]
    }

    #[inline]
    fn leaf_mut(&mut self, id: LeafId) -> &mut LeafNode<T> {
        &mut self.leaves[id.0 as usize]
    }

    #[inline]
    fn layer(&self, id: LayerId) -> &Layer {
        &self.layers[id.0 as usize]
    }

    #[inline]
    fn layer_mut(&mut self, id: LayerId) -> &mut Layer {
        &mut self.layers[id.0 as usize]
    }

    fn subtree_min(&self, slot: Slot) -> LeafId {
        match slot {
            Slot::Leaf(id) => id,
            Slot::Layer(l) => self.layer(l).min_leaf.expect("non-root layers are never empty"),
            Slot::Empty => unreachable!("empty slot has no subtree"),
        }
    }

    fn subtree_max(&self, slot: Slot) -> LeafId {
        match slot {
            Slot::Leaf(id) => id,
            Slot::Layer(l) => self.layer(l).max_leaf.expect("non-root layers are never empty"),
            Slot::Empty => unreachable!("empty slot has no subtree"),
        }
    }

    fn alloc_leaf(&mut self, key: u64) -> LeafId {
        self.distinct += 1;
        if let Some(id) = self.free_leaves.pop() {
            let leaf = self.leaf_mut(id);
            debug_assert!(leaf.queue.is_empty());
            leaf.key = key;
            leaf.prev = None;
            leaf.next = None;
            return id;
        }
        let id = LeafId(self.leaves.len() as u32);
        self.leaves.push(LeafNode {
            key,
            queue: VecDeque::new(),
            prev: None,
            next: None,
        });
        id
    }

    fn alloc_layer(&mut self, depth: usize) -> LayerId {
        if let Some(id) = self.detached.pop() {
            let layer = &mut self.layers[id.0 as usize];
            // A detached layer holds exactly one slot; its child, if a layer,
            // is queued for reuse in turn.
            for i in layer.occupied.iter() {
                if let Slot::Layer(child) = layer.slots[i] {
                    self.detached.push(child);
                }
                layer.slots[i] = Slot::Empty;
            }
            layer.occupied.clear();
            layer.depth = depth as u8;
            layer.min_leaf = None;
            layer.max_leaf = None;
            return id;
        }
        let id = LayerId(self.layers.len() as u32);
        self.layers.push(Layer {
            depth: depth as u8,
            occupied: IndexSet::new(),
            slots: vec![Slot::Empty; self.config.degree()].into_boxed_slice(),
            min_leaf: None,
            max_leaf: None,
        });
        id
    }

    fn link_after(&mut self, anchor: LeafId, id: LeafId) {
        let next = self.leaf(anchor).next;
        self.leaf_mut(id).prev = Some(anchor);
        self.leaf_mut(id).next = next;
        self.leaf_mut(anchor).next = Some(id);
        match next {
            Some(n) => self.leaf_mut(n).prev = Some(id),
            None => self.tail = Some(id),
        }
    }

    fn link_before(&mut self, anchor: LeafId, id: LeafId) {
        let prev = self.leaf(anchor).prev;
        self.leaf_mut(id).next = Some(anchor);
        self.leaf_mut(id).prev = prev;
        self.leaf_mut(anchor).prev = Some(id);
        match prev {
            Some(p) => self.leaf_mut(p).next = Some(id),
            None => self.head = Some(id),
        }
    }

    fn unlink(&mut self, id: LeafId) {
        let (prev, next) = (self.leaf(id).prev, self.leaf(id).next);
        match prev {
            Some(p) => self.leaf_mut(p).next = next,
            None => self.head = next,
        }
        match next {
            Some(n) => self.leaf_mut(n).prev = prev,
            None => self.tail = prev,
        }
    }

    /// Walks down to the leaf for `key`, creating it (and any layers a
    /// push-down needs) when absent. Caches of every layer on the path are
    /// widened on the way down.
    fn locate_or_create(&mut self, key: u64, st: &mut OpStats) -> LeafId {
        let mut fresh: Option<LeafId> = None;
        let mut layer = ROOT;
        loop {
            st.layers_visited += 1;
            let (depth, min_leaf, max_leaf) = {
                let l = self.layer(layer);
                (l.depth as usize, l.min_leaf, l.max_leaf)
            };
            let idx = self.config.chunk(key, depth);
            if let (Some(mn), Some(mx)) = (min_leaf, max_leaf) {
                // A key outside the subtree's range cannot already exist.
                if key < self.leaf(mn).key {
                    let id = *fresh.get_or_insert_with(|| self.alloc_leaf(key));
                    self.layer_mut(layer).min_leaf = Some(id);
                } else if key > self.leaf(mx).key {
                    let id = *fresh.get_or_insert_with(|| self.alloc_leaf(key));
                    self.layer_mut(layer).max_leaf = Some(id);
                }
            }
            match self.layer(layer).slots[idx] {
                Slot::Empty => {
                    let id = *fresh.get_or_insert_with(|| self.alloc_leaf(key));
                    st.index_ops += 1;
                    st.nodes_spliced += 1;
                    let l = self.layer(layer);
                    if let Some(p) = l.occupied.pred(idx) {
                        let anchor = self.subtree_max(l.slots[p]);
                        self.link_after(anchor, id);
                    } else if let Some(s) = l.occupied.succ(idx) {
                        let anchor = self.subtree_min(l.slots[s]);
                        self.link_before(anchor, id);
                    } else {
                        debug_assert!(layer == ROOT && self.head.is_none());
                        self.head = Some(id);
                        self.tail = Some(id);
                    }
                    let l = self.layer_mut(layer);
                    l.occupied.insert(idx);
                    l.slots[idx] = Slot::Leaf(id);
                    if l.min_leaf.is_none() {
                        l.min_leaf = Some(id);
                        l.max_leaf = Some(id);
                    }
                    return id;
                }
                Slot::Leaf(existing) if self.leaf(existing).key == key => {
                    debug_assert!(fresh.is_none());
                    return existing;
                }
                Slot::Leaf(existing) => {
                    let id = *fresh.get_or_insert_with(|| self.alloc_leaf(key));
                    self.push_down(layer, idx, existing, id, st);
                    return id;
                }
                Slot::Layer(child) => layer = child,
            }
        }
    }

    /// Replaces the leaf `old` in `parent[idx]` by a chain of new layers that
    /// runs until the chunks of `old` and `new` differ, and places both
    /// leaves in the last one.
    fn push_down(&mut self, parent: LayerId, idx: usize, old: LeafId, new: LeafId, st: &mut OpStats) {
        let (old_key, new_key) = (self.leaf(old).key, self.leaf(new).key);
        let (lo, hi) = if new_key < old_key {
            self.link_before(old, new);
            (new, old)
        } else {
            self.link_after(old, new);
            (old, new)
        };
        st.nodes_spliced += 1;

        let mut parent = parent;
        let mut idx = idx;
        let mut depth = self.layer(parent).depth as usize + 1;
        loop {
            assert!(
                depth < self.config.depth_max(),
                "distinct keys must diverge within the word"
            );
            let child = self.alloc_layer(depth);
            st.layers_created += 1;
            st.layers_visited += 1;
            self.layer_mut(parent).slots[idx] = Slot::Layer(child);
            let (a, b) = (self.config.chunk(old_key, depth), self.config.chunk(new_key, depth));
            let l = self.layer_mut(child);
            l.min_leaf = Some(lo);
            l.max_leaf = Some(hi);
            l.occupied.insert(a);
            if a == b {
                parent = child;
                idx = a;
                depth += 1;
                continue;
            }
            l.occupied.insert(b);
            l.slots[a] = Slot::Leaf(old);
            l.slots[b] = Slot::Leaf(new);
            return;
        }
    }

    fn find_leaf(&self, key: u64, st: &mut OpStats) -> Option<LeafId> {
        let mut layer = ROOT;
        loop {
            st.layers_visited += 1;
            let l = self.layer(layer);
            match l.slots[self.config.chunk(key, l.depth as usize)] {
                Slot::Empty => return None,
                Slot::Leaf(id) => return (self.leaf(id).key == key).then_some(id),
                Slot::Layer(child) => layer = child,
            }
        }
    }

    /// One pass from the root. The target leaf is recognised as soon as it is
    /// a cached extreme of the current layer or the only leaf below the
    /// current slot. If its queue drains, caches naming it are moved to its
    /// list neighbours on the way down, and the topmost subtree that holds
    /// nothing else is cut from its parent with a single index removal.
    fn remove_inner(&mut self, key: u64, st: &mut OpStats) -> Option<T> {
        if self.head.is_none() || !self.config.contains(key) {
            return None;
        }
        let mut layer = ROOT;
        let mut target: Option<LeafId> = None;
        loop {
            st.layers_visited += 1;
            let l = self.layer(layer);
            let idx = self.config.chunk(key, l.depth as usize);
            if target.is_none() {
                let mn = l.min_leaf.expect("walked layers are non-empty");
                let mx = l.max_leaf.expect("walked layers are non-empty");
                if self.leaf(mn).key == key {
                    target = Some(mn);
                } else if self.leaf(mx).key == key {
                    target = Some(mx);
                }
                if let Some(x) = target {
                    if self.leaf(x).queue.len() > 1 {
                        return self.leaf_mut(x).queue.pop_front();
                    }
                }
            }
            let slot = l.slots[idx];
            let (cmin, cmax) = match slot {
                Slot::Empty => return None,
                Slot::Leaf(id) => (id, id),
                Slot::Layer(c) => (self.subtree_min(Slot::Layer(c)), self.subtree_max(Slot::Layer(c))),
            };
            if target.is_none() && cmin == cmax {
                if self.leaf(cmin).key != key {
                    return None;
                }
                if self.leaf(cmin).queue.len() > 1 {
                    return self.leaf_mut(cmin).queue.pop_front();
                }
                target = Some(cmin);
            }
            let Some(x) = target else {
                match slot {
                    Slot::Layer(child) => {
                        layer = child;
                        continue;
                    }
                    _ => unreachable!("single-leaf slots are resolved above"),
                }
            };

            let (prev, next) = (self.leaf(x).prev, self.leaf(x).next);
            if cmin == cmax {
                debug_assert_eq!(cmin, x);
                st.index_ops += 1;
                st.nodes_spliced += 1;
                let l = self.layer_mut(layer);
                l.occupied.remove(idx);
                l.slots[idx] = Slot::Empty;
                if l.occupied.is_empty() {
                    debug_assert!(layer == ROOT);
                    l.min_leaf = None;
                    l.max_leaf = None;
                } else {
                    if l.min_leaf == Some(x) {
                        l.min_leaf = next;
                    }
                    if l.max_leaf == Some(x) {
                        l.max_leaf = prev;
                    }
                }
                if let Slot::Layer(child) = slot {
                    self.detached.push(child);
                    st.layers_released += 1;
                }
                self.unlink(x);
                self.distinct -= 1;
                self.free_leaves.push(x);
                return self.leaf_mut(x).queue.pop_front();
            }
            // The subtree keeps other leaves, so list neighbours of `x` stay
            // inside it.
            let l = self.layer_mut(layer);
            if l.min_leaf == Some(x) {
                l.min_leaf = next;
            }
            if l.max_leaf == Some(x) {
                l.max_leaf = prev;
            }
            match slot {
                Slot::Layer(child) => layer = child,
                _ => unreachable!("a leaf slot is a single-leaf subtree"),
            }
        }
    }
}

/// A live leaf: one distinct key with its FIFO queue of payloads.
pub struct LeafRef<'a, T> {
    trie: &'a PTrie<T>,
    id: LeafId,
}

impl<T> Clone for LeafRef<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for LeafRef<'_, T> {}

impl<'a, T> LeafRef<'a, T> {
    pub fn key(&self) -> u64 {
        self.trie.leaf(self.id).key
    }

    /// Number of payloads queued under this key.
    pub fn len(&self) -> usize {
        self.trie.leaf(self.id).queue.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Oldest payload.
    pub fn front(&self) -> &'a T {
        self.trie.leaf(self.id).queue.front().expect("leaf queues are never empty")
    }

    /// Payloads oldest first.
    pub fn payloads(&self) -> impl Iterator<Item = &'a T> + 'a {
        self.trie.leaf(self.id).queue.iter()
    }

    pub fn next(&self) -> Option<LeafRef<'a, T>> {
        self.trie.leaf(self.id).next.map(|id| LeafRef { trie: self.trie, id })
    }

    pub fn prev(&self) -> Option<LeafRef<'a, T>> {
        self.trie.leaf(self.id).prev.map(|id| LeafRef { trie: self.trie, id })
    }
}

impl<T: fmt::Debug> fmt::Debug for PTrie<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PTrie")
            .field("config", &self.config)
            .field("len", &self.len)
            .field("entries", &self.iter().collect::<Vec<_>>())
            .finish()
    }
}

/// Outcome of [`PTrie::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub layers: usize,
    pub leaves: usize,
    pub max_depth: usize,
    pub violation: Option<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }
}

struct Walk {
    layers: usize,
    leaves: usize,
    max_depth: usize,
}

impl<T> PTrie<T> {
    /// Full structural check. Reports the first violated invariant.
    pub fn validate(&self) -> ValidationReport {
        let mut walk = Walk {
            layers: 0,
            leaves: 0,
            max_depth: 0,
        };
        let violation = self.check_list().err().or_else(|| {
            let mut path = Vec::new();
            match self.check_layer(ROOT, 0, &mut path, &mut walk) {
                Err(v) => Some(v),
                Ok(_) if walk.leaves != self.distinct => Some(format!(
                    "trie reaches {} leaves but {} are live",
                    walk.leaves, self.distinct
                )),
                Ok(_) => None,
            }
        });
        ValidationReport {
            layers: walk.layers,
            leaves: walk.leaves,
            max_depth: walk.max_depth,
            violation,
        }
    }

    fn check_list(&self) -> Result<(), String> {
        let mut count = 0;
        let mut payloads = 0;
        let mut prev: Option<LeafId> = None;
        let mut cur = self.head;
        while let Some(id) = cur {
            let leaf = self.leaf(id);
            if leaf.prev != prev {
                return Err(format!("list back link broken at key {}", leaf.key));
            }
            if let Some(p) = prev {
                if self.leaf(p).key >= leaf.key {
                    return Err(format!(
                        "list keys not strictly increasing: {} then {}",
                        self.leaf(p).key,
                        leaf.key
                    ));
                }
            }
            if leaf.queue.is_empty() {
                return Err(format!("empty queue at key {}", leaf.key));
            }
            let mut st = OpStats::default();
            if self.find_leaf(leaf.key, &mut st) != Some(id) {
                return Err(format!("listed key {} not reachable through the trie", leaf.key));
            }
            count += 1;
            payloads += leaf.queue.len();
            if count > self.leaves.len() {
                return Err("list contains a cycle".into());
            }
            prev = cur;
            cur = leaf.next;
        }
        if self.tail != prev {
            return Err("tail does not match the last listed leaf".into());
        }
        if count != self.distinct {
            return Err(format!("list has {count} leaves, expected {}", self.distinct));
        }
        if payloads != self.len {
            return Err(format!("queues hold {payloads} payloads, count is {}", self.len));
        }
        Ok(())
    }

    /// Returns the (min, max) leaf of the subtree, checking caches bottom-up.
    fn check_layer(
        &self,
        id: LayerId,
        depth: usize,
        path: &mut Vec<usize>,
        walk: &mut Walk,
    ) -> Result<Option<(LeafId, LeafId)>, String> {
        let layer = self.layer(id);
        walk.layers += 1;
        walk.max_depth = walk.max_depth.max(depth + 1);
        if depth >= self.config.depth_max() {
            return Err(format!("layer at depth {depth} exceeds M/K"));
        }
        if layer.depth as usize != depth {
            return Err(format!("layer records depth {} but sits at {depth}", layer.depth));
        }
        if layer.slots.len() != self.config.degree() {
            return Err("layer slot table has the wrong size".into());
        }
        let mut extremes: Option<(LeafId, LeafId)> = None;
        for (i, slot) in layer.slots.iter().enumerate() {
            if layer.occupied.contains(i) == (*slot == Slot::Empty) {
                return Err(format!("occupied set disagrees with slot {i} at depth {depth}"));
            }
            path.push(i);
            let sub = match *slot {
                Slot::Empty => None,
                Slot::Leaf(leaf) => {
                    walk.leaves += 1;
                    let key = self.leaf(leaf).key;
                    if path
                        .iter()
                        .enumerate()
                        .any(|(d, &c)| self.config.chunk(key, d) != c)
                    {
                        path.pop();
                        return Err(format!("key {key} stored under a foreign prefix"));
                    }
                    Some((leaf, leaf))
                }
                Slot::Layer(child) => {
                    let sub = self.check_layer(child, depth + 1, path, walk)?;
                    if sub.is_none() {
                        path.pop();
                        return Err(format!("empty layer below depth {depth}"));
                    }
                    sub
                }
            };
            path.pop();
            if let Some((lo, hi)) = sub {
                extremes = Some(match extremes {
                    None => (lo, hi),
                    Some((first, _)) => (first, hi),
                });
            }
        }
        let (want_min, want_max) = (extremes.map(|e| e.0), extremes.map(|e| e.1));
        if layer.min_leaf != want_min {
            return Err(format!("min_leaf mismatch at depth {depth}"));
        }
        if layer.max_leaf != want_max {
            return Err(format!("max_leaf mismatch at depth {depth}"));
        }
        if depth == 0 && (self.head != want_min || self.tail != want_max) {
            return Err("list ends disagree with root extremes".into());
        }
        Ok(extremes)
    }

    /// Hash of the full structure: layer shapes, cached extremes, keys and
    /// queue lengths. Equal fingerprints mean `validate` would see the same
    /// structure.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.len.hash(&mut h);
        self.head.map(|id| self.leaf(id).key).hash(&mut h);
        self.tail.map(|id| self.leaf(id).key).hash(&mut h);
        let mut stack = vec![ROOT];
        while let Some(id) = stack.pop() {
            let layer = self.layer(id);
            layer.depth.hash(&mut h);
            layer.occupied.words().hash(&mut h);
            layer.min_leaf.map(|l| self.leaf(l).key).hash(&mut h);
            layer.max_leaf.map(|l| self.leaf(l).key).hash(&mut h);
            for i in layer.occupied.iter() {
                match layer.slots[i] {
                    Slot::Leaf(l) => {
                        let leaf = self.leaf(l);
                        (leaf.key, leaf.queue.len()).hash(&mut h);
                    }
                    Slot::Layer(child) => stack.push(child),
                    Slot::Empty => {}
                }
            }
        }
        h.finish()
    }

    #[cfg(test)]
    fn corrupt_min_cache(&mut self) {
        let last = self.tail;
        self.layers[0].min_leaf = last;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trie(m: u32, k: u32) -> PTrie<u32> {
        PTrie::new(PTrieConfig::new(m, k).unwrap())
    }

    fn drain(t: &mut PTrie<u32>) -> Vec<(u64, u32)> {
        std::iter::from_fn(|| t.delete_min()).collect()
    }

    #[test]
    fn empty_trie() {
        let mut t = trie(32, 4);
        assert!(t.validate().is_ok());
        assert_eq!(t.minimum(), None);
        assert_eq!(t.maximum(), None);
        assert_eq!(t.delete_min(), None);
        assert_eq!(t.remove(3), None);
        assert!(!t.search(3));
        assert!(t.first().is_none());
    }

    #[test]
    fn drain_is_sorted_and_stable() {
        let mut t = trie(32, 4);
        for (i, k) in [5u64, 3, 5, 1].into_iter().enumerate() {
            t.insert(k, i as u32).unwrap();
        }
        assert_eq!(drain(&mut t), vec![(1, 3), (3, 1), (5, 0), (5, 2)]);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn first_insert_is_head_and_tail() {
        let mut t = trie(32, 4);
        t.insert(42, 0).unwrap();
        let first = t.first().unwrap();
        assert_eq!(first.key(), 42);
        assert_eq!(t.last().unwrap().key(), 42);
        assert!(first.next().is_none());
        assert!(first.prev().is_none());
        assert_eq!(t.minimum(), t.maximum());
    }

    #[test]
    fn deep_shared_prefix_pushes_down_to_last_level() {
        let mut t = trie(32, 4);
        t.insert(0x1234_ABCD, 0).unwrap();
        t.insert(0x1234_ABCE, 1).unwrap();
        let report = t.validate();
        assert!(report.is_ok(), "{:?}", report.violation);
        assert_eq!(report.max_depth, 8);
        assert_eq!(t.layers_per_depth(), vec![1; 8]);
        assert_eq!(t.last_op_stats().layers_visited, 8);
        assert_eq!(t.last_op_stats().layers_created, 7);
        let keys: Vec<u64> = t.iter().map(|(k, _)| k).collect();
        assert_eq!(keys, vec![0x1234_ABCD, 0x1234_ABCE]);
        assert!(!t.search(0x1234_ABCF));
        assert!(t.search(0x1234_ABCE));
    }

    #[test]
    fn fifo_remove_of_duplicates() {
        let mut t = trie(32, 4);
        t.insert(7, 1).unwrap();
        t.insert(7, 2).unwrap();
        assert_eq!(t.minimum(), Some((7, &1)));
        assert_eq!(t.remove(7), Some(1));
        assert_eq!(t.remove(7), Some(2));
        assert_eq!(t.remove(7), None);
        assert!(t.is_empty());
    }

    #[test]
    fn removing_last_leaf_of_shared_layer_deletes_it() {
        let mut t = trie(8, 4);
        t.insert(0x10, 0).unwrap();
        t.insert(0x1F, 1).unwrap();
        assert_eq!(t.layers_per_depth(), vec![1, 1]);
        assert_eq!(t.remove(0x1F), Some(1));
        let report = t.validate();
        assert!(report.is_ok(), "{:?}", report.violation);
        assert_eq!(t.layers_per_depth(), vec![1, 1]);
        assert_eq!(t.remove(0x10), Some(0));
        assert!(t.validate().is_ok());
        assert_eq!(t.layers_per_depth(), vec![1, 0]);
        assert!(t.layers[0].occupied.is_empty());
    }

    #[test]
    fn search_membership() {
        let mut t = trie(32, 4);
        t.insert(2, 0).unwrap();
        t.insert(7, 0).unwrap();
        assert!(t.search(7));
        assert!(!t.search(4));
        assert!(!t.search(u64::MAX));
    }

    #[test]
    fn out_of_range_key_is_rejected() {
        let mut t = trie(8, 4);
        assert_eq!(t.insert(256, 0), Err(KeyError { key: 256, word_bits: 8 }));
        assert!(t.insert(255, 0).is_ok());
    }

    #[test]
    fn cursor_walks_both_ways() {
        let mut t = trie(16, 4);
        for k in [900u64, 3, 77, 77, 4096, 12] {
            t.insert(k, 0).unwrap();
        }
        let mut fwd = Vec::new();
        let mut cur = t.first();
        while let Some(l) = cur {
            fwd.push(l.key());
            cur = l.next();
        }
        let mut back = Vec::new();
        let mut cur = t.last();
        while let Some(l) = cur {
            back.push(l.key());
            cur = l.prev();
        }
        back.reverse();
        assert_eq!(fwd, vec![3, 12, 77, 900, 4096]);
        assert_eq!(fwd, back);
        assert_eq!(t.distinct_keys(), 5);
    }

    #[test]
    fn corrupted_min_cache_is_reported() {
        let mut t = trie(32, 4);
        for k in [1u64, 2, 3] {
            t.insert(k, 0).unwrap();
        }
        t.corrupt_min_cache();
        let report = t.validate();
        assert!(report.violation.unwrap().contains("min_leaf mismatch"));
    }

    #[test]
    fn detached_layers_are_reused() {
        let mut t = trie(32, 4);
        t.insert(0x1111_1110, 0).unwrap();
        t.insert(0x1111_1111, 0).unwrap();
        t.insert(0x2000_0000, 0).unwrap();
        let allocated = t.layers.len();
        t.remove(0x1111_1110);
        t.remove(0x1111_1111);
        assert!(t.validate().is_ok());
        t.insert(0x3333_3330, 0).unwrap();
        t.insert(0x3333_3331, 0).unwrap();
        assert!(t.validate().is_ok());
        assert_eq!(t.layers.len(), allocated);
    }

    #[test]
    fn search_leaves_structure_untouched() {
        let mut t = trie(32, 4);
        for k in [10u64, 20, 0xFFFF_0000, 0xFFFF_0001] {
            t.insert(k, 0).unwrap();
        }
        let before = t.fingerprint();
        for k in [10u64, 11, 0xFFFF_0001, 0xFFFF_0002] {
            t.search(k);
        }
        assert_eq!(before, t.fingerprint());
    }

    #[test]
    fn delete_max_takes_oldest_of_largest() {
        let mut t = trie(32, 4);
        t.insert(9, 1).unwrap();
        t.insert(9, 2).unwrap();
        t.insert(1, 3).unwrap();
        assert_eq!(t.maximum(), Some((9, &1)));
        assert_eq!(t.delete_max(), Some((9, 1)));
        assert_eq!(t.delete_max(), Some((9, 2)));
        assert_eq!(t.delete_max(), Some((1, 3)));
    }
}

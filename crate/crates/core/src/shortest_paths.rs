//! Dijkstra single-source and single-destination shortest paths over a
//! stable priority queue.
//!
//! The queue holds arcs, not vertices. Extracting an arc whose head is
//! already settled (or is the source) rejects it; there is no decrease-key.
//! Because the queue is FIFO among equal path weights, ties are broken by
//! the order in which arcs were offered.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PTrieConfig;
use crate::graph::{Graph, VertexId};
use crate::ptrie::PTrie;
use crate::queue::MinQueue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QueueEntry {
    /// Weight of the arc itself.
    pub weight: u64,
    /// Distance of `tail` plus `weight`; the queue key.
    pub path_weight: u64,
    pub tail: VertexId,
    pub head: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackLink {
    pub parent: VertexId,
    /// Weight of the final arc parent -> vertex, not the distance.
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathTree {
    pub source: VertexId,
    pub back: Vec<Option<BackLink>>,
    /// `None` marks an unreachable vertex.
    pub dist: Vec<Option<u64>>,
    pub hops: Vec<Option<u32>>,
}

impl PathTree {
    fn new(n: usize, source: VertexId) -> Self {
        let mut t = Self {
            source,
            back: vec![None; n],
            dist: vec![None; n],
            hops: vec![None; n],
        };
        t.dist[source.0] = Some(0);
        t.hops[source.0] = Some(0);
        t
    }

    pub fn is_reachable(&self, v: VertexId) -> bool {
        self.dist[v.0].is_some()
    }

    fn is_settled(&self, v: VertexId) -> bool {
        v == self.source || self.back[v.0].is_some()
    }
}

/// One extraction from the queue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    /// 1-based extraction index.
    pub step: usize,
    pub entry: QueueEntry,
    pub rejected: bool,
    /// Queue contents just before this extraction, in drain order.
    pub queue: Vec<QueueEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("unknown vertex #{0}")]
    UnknownVertex(usize),
    #[error("path weight {tail_dist} + {weight} does not fit in the queue key")]
    PathWeightOverflow { tail_dist: u64, weight: u64 },
}

fn offer<Q: MinQueue<QueueEntry>>(
    g: &Graph,
    v: VertexId,
    dist: u64,
    queue: &mut Q,
) -> Result<(), PathError> {
    for arc in g.arcs(v) {
        let path_weight = dist.checked_add(arc.weight).ok_or(PathError::PathWeightOverflow {
            tail_dist: dist,
            weight: arc.weight,
        })?;
        let entry = QueueEntry {
            weight: arc.weight,
            path_weight,
            tail: v,
            head: arc.head,
        };
        // The only push failure is a key wider than the queue's word.
        queue.push(path_weight, entry).map_err(|_| PathError::PathWeightOverflow {
            tail_dist: dist,
            weight: arc.weight,
        })?;
    }
    Ok(())
}

/// Core loop. `observe` sees each extracted entry, its verdict and the
/// queue as left after the pop (before the head's arcs are offered).
fn run<Q, F>(g: &Graph, s: VertexId, queue: &mut Q, mut observe: F) -> Result<PathTree, PathError>
where
    Q: MinQueue<QueueEntry>,
    F: FnMut(&Q, &QueueEntry, bool),
{
    if !g.contains(s) {
        return Err(PathError::UnknownVertex(s.0));
    }
    let mut tree = PathTree::new(g.vertex_count(), s);
    offer(g, s, 0, queue)?;
    while let Some((_, entry)) = queue.pop_min() {
        let rejected = tree.is_settled(entry.head);
        observe(queue, &entry, rejected);
        if rejected {
            continue;
        }
        let h = entry.head.0;
        tree.back[h] = Some(BackLink {
            parent: entry.tail,
            weight: entry.weight,
        });
        tree.dist[h] = Some(entry.path_weight);
        tree.hops[h] = tree.hops[entry.tail.0].map(|x| x + 1);
        offer(g, entry.head, entry.path_weight, queue)?;
    }
    Ok(tree)
}

/// Shortest paths from `s` using a caller-supplied queue, which is left
/// empty. Lets callers read queue statistics or swap in another queue.
pub fn sssp_in<Q: MinQueue<QueueEntry>>(g: &Graph, s: VertexId, queue: &mut Q) -> Result<PathTree, PathError> {
    run(g, s, queue, |_, _, _| {})
}

/// Shortest paths from `s` on a fresh PTrie.
pub fn sssp(g: &Graph, s: VertexId, config: PTrieConfig) -> Result<PathTree, PathError> {
    sssp_in(g, s, &mut PTrie::new(config))
}

/// Shortest paths into `d`: `dist(v)` is the weight of the best path
/// `v ~> d` in `g`, and back links step from `v` toward `d`.
pub fn sdsp(g: &Graph, d: VertexId, config: PTrieConfig) -> Result<PathTree, PathError> {
    if !g.contains(d) {
        return Err(PathError::UnknownVertex(d.0));
    }
    sssp(&g.reverse(), d, config)
}

/// Same result as [`sssp`] plus one event per extraction.
pub fn sssp_trace(g: &Graph, s: VertexId, config: PTrieConfig) -> Result<(PathTree, Vec<TraceEvent>), PathError> {
    let mut queue = PTrie::new(config);
    let mut events = Vec::new();
    let tree = run(g, s, &mut queue, |q: &PTrie<QueueEntry>, entry, rejected| {
        // The extracted entry was the queue's first in drain order.
        let snapshot = std::iter::once(*entry).chain(q.iter().map(|(_, e)| *e)).collect();
        events.push(TraceEvent {
            step: events.len() + 1,
            entry: *entry,
            rejected,
            queue: snapshot,
        });
    })?;
    Ok((tree, events))
}

/// Back chain from `v` to the tree's source, inclusive. Each vertex but the
/// last carries the weight of its back arc. `None` if `v` is unreachable.
pub fn walk(tree: &PathTree, v: VertexId) -> Option<Vec<(VertexId, Option<u64>)>> {
    if !tree.is_reachable(v) {
        return None;
    }
    let mut out = Vec::new();
    let mut cur = v;
    while let Some(link) = tree.back[cur.0] {
        out.push((cur, Some(link.weight)));
        cur = link.parent;
        if out.len() > tree.back.len() {
            return None;
        }
    }
    out.push((cur, None));
    Some(out)
}

/// `[E]--(0)->[G]--(1)->[F]`.
pub fn format_walk(g: &Graph, path: &[(VertexId, Option<u64>)]) -> String {
    let mut s = String::new();
    for (v, w) in path {
        s.push('[');
        s.push_str(g.label(*v));
        s.push(']');
        if let Some(w) = w {
            s.push_str(&format!("--({w})->"));
        }
    }
    s
}

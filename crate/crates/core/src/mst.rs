//! Jarnik-Prim minimum spanning tree with the PTrie as the arc queue.
//!
//! Frontier arcs are keyed by their own weight. An extracted arc whose head
//! is already in the tree is dropped (lazy deletion).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PTrieConfig;
use crate::graph::{Arc, Graph, VertexId};
use crate::ptrie::PTrie;
use crate::queue::MinQueue;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MstEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MstResult {
    /// Edges in acceptance order, oriented tree vertex -> new vertex.
    pub edges: Vec<MstEdge>,
    pub total_weight: u64,
    /// Vertices in the order they joined the tree, root first.
    pub spanned: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MstError {
    #[error("unknown vertex #{0}")]
    UnknownVertex(usize),
    #[error("edge weight {0} does not fit in the queue key")]
    WeightOverflow(u64),
}

fn offer<Q: MinQueue<Arc>>(g: &Graph, v: VertexId, queue: &mut Q) -> Result<(), MstError> {
    for arc in g.arcs(v) {
        queue.push(arc.weight, *arc).map_err(|_| MstError::WeightOverflow(arc.weight))?;
    }
    Ok(())
}

/// Prim from `root` over a caller-supplied queue. Spans the root's
/// connected component; other components are ignored.
pub fn mst_prim_in<Q: MinQueue<Arc>>(g: &Graph, root: VertexId, queue: &mut Q) -> Result<MstResult, MstError> {
    if !g.contains(root) {
        return Err(MstError::UnknownVertex(root.0));
    }
    let mut in_tree = vec![false; g.vertex_count()];
    in_tree[root.0] = true;
    let mut result = MstResult {
        edges: Vec::new(),
        total_weight: 0,
        spanned: vec![root],
    };
    offer(g, root, queue)?;
    while let Some((_, arc)) = queue.pop_min() {
        if in_tree[arc.head.0] {
            continue;
        }
        in_tree[arc.head.0] = true;
        result.edges.push(MstEdge {
            u: arc.tail,
            v: arc.head,
            weight: arc.weight,
        });
        result.total_weight += arc.weight;
        result.spanned.push(arc.head);
        offer(g, arc.head, queue)?;
    }
    Ok(result)
}

pub fn mst_prim(g: &Graph, root: VertexId, config: PTrieConfig) -> Result<MstResult, MstError> {
    mst_prim_in(g, root, &mut PTrie::new(config))
}

//! Stable multilevel prefix-tree priority queue (PTrie) and the graph
//! algorithms built on it: Jarnik-Prim MST, Dijkstra single-source and
//! single-destination shortest paths with FIFO tie-breaking.

pub mod analysis;
pub mod bench;
pub mod config;
pub mod graph;
pub mod index_set;
pub mod keycodec;
pub mod mst;
pub mod par;
pub mod ptrie;
pub mod queue;
pub mod shortest_paths;
pub mod stats;

pub use config::{ConfigError, PTrieConfig};
pub use graph::{Arc, Graph, GraphError, ParseError, VertexId};
pub use keycodec::{CodecError, SignedPTrie};
pub use mst::{mst_prim, MstResult};
pub use par::Exec;
pub use ptrie::{KeyError, LeafRef, PTrie, ValidationReport};
pub use queue::{MinQueue, StableBinaryHeap};
pub use shortest_paths::{sdsp, sssp, sssp_trace, walk, PathTree, QueueEntry, TraceEvent};
pub use stats::{OpKind, OpStats, OpTotals, StatsSummary};

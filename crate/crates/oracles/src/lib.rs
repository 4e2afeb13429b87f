//! Reference implementations used to cross-check `ptrie-core`.
//!
//! Nothing here depends on the product crate: graphs are plain arc lists
//! over vertex indices `0..n`, and the priority-queue oracle is a sorted
//! vector. Speed is irrelevant; each oracle is written to be obviously right.

pub mod graph;
pub mod stable_pq;

pub use graph::{brute_force_all_targets, brute_force_best_path, dijkstra_heap, kruskal, SizeGuard, BRUTE_FORCE_MAX_VERTICES};
pub use stable_pq::{compare_streams, stable_pq_replay, Op, Outcome, StableSortedList};

/// Result of comparing a product output stream with an oracle stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub matched: bool,
    pub first_divergence: Option<String>,
}

impl OracleVerdict {
    pub fn matched() -> Self {
        Self {
            matched: true,
            first_divergence: None,
        }
    }

    pub fn diverged(description: impl Into<String>) -> Self {
        Self {
            matched: false,
            first_divergence: Some(description.into()),
        }
    }
}

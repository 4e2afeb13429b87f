use serde::{Deserialize, Serialize};

/// Counters for a single PTrie operation.
///
/// `layers_visited` counts layers entered while walking down from the root,
/// including layers created by a push-down on the way. `index_ops` counts
/// ordered index-set operations that need a neighbour search or removal
/// (at most one per insert or remove). Filling a freshly created layer and
/// reclaiming a detached chain are tallied separately in `layers_created`
/// and `layers_released`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpStats {
    pub layers_visited: u32,
    pub index_ops: u32,
    pub nodes_spliced: u32,
    pub layers_created: u32,
    pub layers_released: u32,
}

impl OpStats {
    /// Primitive steps in the `M/K + K` cost model: one per layer traversed
    /// plus `K` per ordered index-set operation (the height of a balanced
    /// search tree over `2^K` indices).
    #[inline]
    pub fn primitive_steps(&self, stride_bits: u32) -> u64 {
        self.layers_visited as u64 + stride_bits as u64 * self.index_ops as u64
    }
}

/// Which public operation produced an [`OpStats`] record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Insert,
    Remove,
    Search,
}

/// Running totals over every instrumented operation of one kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpTotals {
    pub ops: u64,
    pub steps: u64,
    pub max_steps: u64,
    pub layers_visited: u64,
    pub max_layers_visited: u64,
    pub index_ops: u64,
}

impl OpTotals {
    pub fn record(&mut self, stats: &OpStats, stride_bits: u32) {
        let steps = stats.primitive_steps(stride_bits);
        self.ops += 1;
        self.steps += steps;
        self.max_steps = self.max_steps.max(steps);
        self.layers_visited += stats.layers_visited as u64;
        self.max_layers_visited = self.max_layers_visited.max(stats.layers_visited as u64);
        self.index_ops += stats.index_ops as u64;
    }

    pub fn merge(&mut self, other: &OpTotals) {
        self.ops += other.ops;
        self.steps += other.steps;
        self.max_steps = self.max_steps.max(other.max_steps);
        self.layers_visited += other.layers_visited;
        self.max_layers_visited = self.max_layers_visited.max(other.max_layers_visited);
        self.index_ops += other.index_ops;
    }

    pub fn mean_steps(&self) -> f64 {
        if self.ops == 0 {
            0.0
        } else {
            self.steps as f64 / self.ops as f64
        }
    }

    pub fn mean_layers_visited(&self) -> f64 {
        if self.ops == 0 {
            0.0
        } else {
            self.layers_visited as f64 / self.ops as f64
        }
    }
}

/// Per-kind totals kept by a PTrie since creation (or the last reset).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub insert: OpTotals,
    pub remove: OpTotals,
    pub search: OpTotals,
}

impl StatsSummary {
    pub fn record(&mut self, kind: OpKind, stats: &OpStats, stride_bits: u32) {
        match kind {
            OpKind::Insert => self.insert.record(stats, stride_bits),
            OpKind::Remove => self.remove.record(stats, stride_bits),
            OpKind::Search => self.search.record(stats, stride_bits),
        }
    }

    /// Insert and remove combined: the mutating operations.
    pub fn updates(&self) -> OpTotals {
        let mut t = self.insert;
        t.merge(&self.remove);
        t
    }

    pub fn merge(&mut self, other: &StatsSummary) {
        self.insert.merge(&other.insert);
        self.remove.merge(&other.remove);
        self.search.merge(&other.search);
    }
}

//! Seeded queue benchmark: a random insert/delete_min workload followed by
//! Dijkstra on a generated graph, run against each queue kind.
//!
//! Everything except the `timing` block is a pure function of the
//! parameters, so two runs with the same seed produce identical counts.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::PTrieConfig;
use crate::graph::{Graph, VertexId};
use crate::par::{self, Exec};
use crate::ptrie::PTrie;
use crate::queue::{MinQueue, StableBinaryHeap};
use crate::shortest_paths::{sssp_in, QueueEntry};
use crate::stats::OpTotals;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueKind {
    Ptrie,
    Heap,
}

impl QueueKind {
    pub const ALL: [QueueKind; 2] = [QueueKind::Ptrie, QueueKind::Heap];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchParams {
    /// Number of inserts in the workload; each is matched by a delete_min.
    pub n: usize,
    pub config: PTrieConfig,
    pub seed: u64,
    pub timing: bool,
}

/// Arcs per vertex in the generated Dijkstra graph.
pub const GRAPH_OUT_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Insert(u64),
    DeleteMin,
}

/// `n` inserts of uniform keys interleaved with `n` delete_mins. While
/// inserts remain, an insert is chosen with probability 2/3 (always when the
/// queue is empty), so the queue grows to about `n/3` before draining.
fn workload(n: usize, config: PTrieConfig, seed: u64) -> Vec<Op> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max = config.max_key();
    let mut ops = Vec::with_capacity(2 * n);
    let (mut inserted, mut size) = (0, 0usize);
    while inserted < n || size > 0 {
        let insert = inserted < n && (size == 0 || rng.gen_ratio(2, 3));
        if insert {
            let key = if max == u64::MAX { rng.gen() } else { rng.gen_range(0..=max) };
            ops.push(Op::Insert(key));
            inserted += 1;
            size += 1;
        } else {
            ops.push(Op::DeleteMin);
            size -= 1;
        }
    }
    ops
}

/// Random digraph with `n` vertices, a Hamiltonian cycle for reachability
/// and `GRAPH_OUT_DEGREE - 1` further arcs per vertex, weights in
/// `0..2^16` (clipped to the word).
pub fn generate_graph(n: usize, config: PTrieConfig, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let n = n.max(1);
    let mut g = Graph::new(config.word_bits());
    for i in 0..n {
        g.add_vertex(&format!("v{i}")).expect("labels are distinct");
    }
    // Keep every path weight inside the key space.
    let max_path = config.max_key();
    let wmax = (max_path / n as u64).clamp(1, 1 << 16);
    for i in 0..n {
        let mut arc = |head: usize, rng: &mut ChaCha8Rng| {
            let w = rng.gen_range(0..wmax);
            g.add_arc(VertexId(i), VertexId(head), w).expect("weight within word");
        };
        arc((i + 1) % n, &mut rng);
        for _ in 1..GRAPH_OUT_DEGREE {
            let h = rng.gen_range(0..n);
            arc(h, &mut rng);
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepReport {
    pub ops: u64,
    pub mean_steps: f64,
    pub max_steps: u64,
    pub mean_layers_visited: f64,
    pub max_layers_visited: u64,
}

impl From<OpTotals> for StepReport {
    fn from(t: OpTotals) -> Self {
        Self {
            ops: t.ops,
            mean_steps: t.mean_steps(),
            max_steps: t.max_steps,
            mean_layers_visited: t.mean_layers_visited(),
            max_layers_visited: t.max_layers_visited,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Timing {
    pub workload_secs: f64,
    pub workload_ops_per_sec: f64,
    pub dijkstra_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QueueReport {
    pub queue: QueueKind,
    pub workload_ops: u64,
    /// Order-sensitive hash of every extracted `(key, payload)`; equal for
    /// two queues that drain identically.
    pub extraction_checksum: u64,
    pub dijkstra_vertices: usize,
    pub dijkstra_arcs: usize,
    pub dijkstra_reached: usize,
    pub dijkstra_dist_sum: u64,
    /// PTrie only: steps of every workload operation.
    pub workload_steps: Option<StepReport>,
    /// PTrie only: steps of every queue operation during Dijkstra.
    pub dijkstra_steps: Option<StepReport>,
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchReport {
    pub n: usize,
    pub seed: u64,
    pub word_bits: u32,
    pub stride_bits: u32,
    pub queues: Vec<QueueReport>,
}

fn mix(h: u64, x: u64) -> u64 {
    (h ^ x).wrapping_mul(0x100_0000_01b3).rotate_left(17)
}

fn replay<Q: MinQueue<u64>>(ops: &[Op], q: &mut Q) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325;
    for (i, op) in ops.iter().enumerate() {
        match *op {
            Op::Insert(k) => q.push(k, i as u64).expect("workload keys fit the word"),
            Op::DeleteMin => {
                let (k, p) = q.pop_min().expect("workload never pops an empty queue");
                h = mix(mix(h, k), p);
            }
        }
    }
    h
}

fn run_one(kind: QueueKind, params: &BenchParams, ops: &[Op], graph: &Graph) -> QueueReport {
    let cfg = params.config;
    let t0 = Instant::now();
    let (checksum, workload_steps) = match kind {
        QueueKind::Ptrie => {
            let mut q = PTrie::new(cfg);
            let h = replay(ops, &mut q);
            (h, Some(q.stats_summary().updates().into()))
        }
        QueueKind::Heap => (replay(ops, &mut StableBinaryHeap::new(cfg.word_bits())), None),
    };
    let workload_secs = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let (tree, dijkstra_steps) = match kind {
        QueueKind::Ptrie => {
            let mut q: PTrie<QueueEntry> = PTrie::new(cfg);
            let t = sssp_in(graph, VertexId(0), &mut q);
            (t, Some(q.stats_summary().updates().into()))
        }
        QueueKind::Heap => (sssp_in(graph, VertexId(0), &mut StableBinaryHeap::new(cfg.word_bits())), None),
    };
    let dijkstra_secs = t1.elapsed().as_secs_f64();
    let tree = tree.expect("generated graphs keep path weights inside the word");

    QueueReport {
        queue: kind,
        workload_ops: ops.len() as u64,
        extraction_checksum: checksum,
        dijkstra_vertices: graph.vertex_count(),
        dijkstra_arcs: graph.arc_count(),
        dijkstra_reached: tree.dist.iter().flatten().count(),
        dijkstra_dist_sum: tree.dist.iter().flatten().sum(),
        workload_steps,
        dijkstra_steps,
        timing: params.timing.then(|| Timing {
            workload_secs,
            workload_ops_per_sec: ops.len() as f64 / workload_secs.max(1e-9),
            dijkstra_secs,
        }),
    }
}

/// Runs the workload and Dijkstra for each requested queue kind. The graph
/// has `max(n / GRAPH_OUT_DEGREE, 1)` vertices so it carries about `n` arcs.
pub fn run_bench(params: &BenchParams, kinds: &[QueueKind], exec: Exec) -> BenchReport {
    let ops = workload(params.n, params.config, params.seed);
    let graph = generate_graph(params.n / GRAPH_OUT_DEGREE, params.config, params.seed);
    let queues = par::map(exec, kinds.to_vec(), |k| run_one(k, params, &ops, &graph));
    BenchReport {
        n: params.n,
        seed: params.seed,
        word_bits: params.config.word_bits(),
        stride_bits: params.config.stride_bits(),
        queues,
    }
}

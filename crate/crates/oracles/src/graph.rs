use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Largest vertex count accepted by [`brute_force_best_path`].
pub const BRUTE_FORCE_MAX_VERTICES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuard {
    pub vertices: usize,
}

impl std::fmt::Display for SizeGuard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} vertices exceeds the brute-force limit of {BRUTE_FORCE_MAX_VERTICES}",
            self.vertices
        )
    }
}

impl std::error::Error for SizeGuard {}

/// Textbook Dijkstra with a binary heap and stale-entry skipping.
/// `arcs` are directed `(tail, head, weight)` over vertices `0..n`.
pub fn dijkstra_heap(n: usize, arcs: &[(usize, usize, u64)], source: usize) -> Vec<Option<u64>> {
    let mut adj = vec![Vec::new(); n];
    for &(t, h, w) in arcs {
        adj[t].push((h, w));
    }
    let mut dist: Vec<Option<u64>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0);
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if dist[v].is_none_or(|cur| nd < cur) {
                dist[v] = Some(nd);
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Total weight of a minimum spanning forest. `edges` are undirected.
pub fn kruskal(n: usize, edges: &[(usize, usize, u64)]) -> u64 {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut sorted = edges.to_vec();
    sorted.sort_by_key(|e| e.2);
    let mut total = 0;
    for (u, v, w) in sorted {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            total += w;
        }
    }
    total
}

/// Exhaustive search over simple paths from `source` to `target`.
///
/// Returns the minimum path weight and, among the paths achieving it, the
/// minimum number of arcs; `None` when `target` is unreachable.
pub fn brute_force_best_path(
    n: usize,
    arcs: &[(usize, usize, u64)],
    source: usize,
    target: usize,
) -> Result<Option<(u64, u32)>, SizeGuard> {
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(SizeGuard { vertices: n });
    }
    let mut adj = vec![Vec::new(); n];
    for &(t, h, w) in arcs {
        adj[t].push((h, w));
    }
    let mut best: Option<(u64, u32)> = None;
    let mut on_path = vec![false; n];
    fn dfs(
        u: usize,
        target: usize,
        weight: u64,
        hops: u32,
        adj: &[Vec<(usize, u64)>],
        on_path: &mut [bool],
        best: &mut Option<(u64, u32)>,
    ) {
        if u == target {
            if best.is_none_or(|b| (weight, hops) < b) {
                *best = Some((weight, hops));
            }
            return;
        }
        on_path[u] = true;
        for &(v, w) in &adj[u] {
            if !on_path[v] {
                dfs(v, target, weight + w, hops + 1, adj, on_path, best);
            }
        }
        on_path[u] = false;
    }
    dfs(source, target, 0, 0, &adj, &mut on_path, &mut best);
    Ok(best)
}

/// [`brute_force_best_path`] for every target at once: one enumeration of
/// the simple paths leaving `source`, since each prefix of a simple path is
/// itself a simple path to the vertex it ends at.
pub fn brute_force_all_targets(
    n: usize,
    arcs: &[(usize, usize, u64)],
    source: usize,
) -> Result<Vec<Option<(u64, u32)>>, SizeGuard> {
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(SizeGuard { vertices: n });
    }
    let mut adj = vec![Vec::new(); n];
    for &(t, h, w) in arcs {
        adj[t].push((h, w));
    }
    let mut best = vec![None; n];
    let mut on_path = vec![false; n];
    fn dfs(
        u: usize,
        weight: u64,
        hops: u32,
        adj: &[Vec<(usize, u64)>],
        on_path: &mut [bool],
        best: &mut [Option<(u64, u32)>],
    ) {
        if best[u].is_none_or(|b| (weight, hops) < b) {
            best[u] = Some((weight, hops));
        }
        on_path[u] = true;
        for &(v, w) in &adj[u] {
            if !on_path[v] {
                dfs(v, weight + w, hops + 1, adj, on_path, best);
            }
        }
        on_path[u] = false;
    }
    dfs(source, 0, 0, &adj, &mut on_path, &mut best);
    Ok(best)
}

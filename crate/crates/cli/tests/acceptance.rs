//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use ptrie_cli::{run, EXIT_OK};
use ptrie_core::analysis::{expected_layers_at_level, prob_exact_occupancy, simulate_layers};
use ptrie_core::bench::{run_bench, BenchParams, QueueKind};
use ptrie_core::graph::Graph;
use ptrie_core::mst::mst_prim;
use ptrie_core::par::{self, Exec};
use ptrie_core::shortest_paths::{sdsp, sssp, sssp_in};
use ptrie_core::{PTrie, PTrieConfig, SignedPTrie, VertexId};
use ptrie_oracles::{brute_force_all_targets, dijkstra_heap, kruskal, StableSortedList};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let out = run(std::iter::once("ptrie").chain(args.iter().copied()).chain(["--json"]));
    if out.code != EXIT_OK {
        return Err(format!("exit {}: {}", out.code, out.stderr.trim()));
    }
    serde_json::from_str(&out.stdout).map_err(|e| e.to_string())
}

fn mst_fig4() -> Check {
    let v = cli_json(&["mst", "--input", &fixture("fig4.g")])?;
    let total = v["totalWeight"].as_u64();
    ensure(total == Some(19), || format!("total {total:?}"))?;
    Ok("w(MST) = 19".into())
}

fn mst_fig1() -> Check {
    let v = cli_json(&["mst", "--input", &fixture("fig1.g")])?;
    let total = v["totalWeight"].as_u64();
    ensure(total == Some(8), || format!("total {total:?}"))?;
    let got: BTreeSet<(String, String, u64)> = v["edges"]
        .as_array()
        .ok_or("no edges")?
        .iter()
        .map(|e| {
            let (a, b) = (e["u"].as_str().unwrap_or(""), e["v"].as_str().unwrap_or(""));
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            (a.to_string(), b.to_string(), e["weight"].as_u64().unwrap_or(u64::MAX))
        })
        .collect();
    let want: BTreeSet<(String, String, u64)> =
        [("A", "B", 1), ("C", "F", 1), ("D", "E", 2), ("B", "E", 2), ("D", "F", 1), ("F", "G", 1)]
            .iter()
            .map(|&(a, b, w)| (a.to_string(), b.to_string(), w))
            .collect();
    ensure(got == want, || format!("edges {got:?}"))?;
    Ok("total 8, edge set matches".into())
}

fn sssp_fig6() -> Check {
    let v = cli_json(&["sssp", "--input", &fixture("fig6.g"), "--source", "A"])?;
    let rows: Vec<(String, Option<u64>, Option<u64>)> = v["vertices"]
        .as_array()
        .ok_or("no vertices")?
        .iter()
        .map(|x| (x["label"].as_str().unwrap_or("").to_string(), x["dist"].as_u64(), x["hops"].as_u64()))
        .collect();
    for (label, d, h) in [("B", 1, 1), ("C", 2, 1), ("D", 4, 2), ("E", 3, 2)] {
        let row = rows.iter().find(|r| r.0 == label).ok_or(format!("missing {label}"))?;
        ensure(row.1 == Some(d) && row.2 == Some(h), || format!("{label}: {row:?}"))?;
    }
    Ok("B:(1,1) C:(2,1) D:(4,2) E:(3,2)".into())
}

fn trace_demo() -> Check {
    let v = cli_json(&["trace", "--input", &fixture("demo.g"), "--source", "A"])?;
    let events = v["events"].as_array().ok_or("no events")?;
    let seq: Vec<(String, u64, bool)> = events
        .iter()
        .map(|e| {
            (
                format!("{}{}", e["tail"].as_str().unwrap_or(""), e["head"].as_str().unwrap_or("")),
                e["pathWeight"].as_u64().unwrap_or(u64::MAX),
                e["rejected"].as_bool() == Some(false),
            )
        })
        .collect();
    let want = [
        ("AD", 1, true),
        ("DB", 2, true),
        ("AB", 3, false),
        ("DF", 3, true),
        ("BA", 3, false),
        ("DB", 4, false),
        ("FC", 4, true),
        ("FG", 4, true),
        ("GE", 4, true),
    ];
    ensure(seq.len() >= want.len(), || format!("only {} events", seq.len()))?;
    for (i, (n, w, a)) in want.iter().enumerate() {
        ensure(seq[i] == (n.to_string(), *w, *a), || format!("step {}: {:?}", i + 1, seq[i]))?;
    }
    ensure(seq[want.len()..].iter().all(|e| !e.2), || "late acceptance".into())?;
    let snapshot: Vec<(u64, String)> = events[1]["queue"]
        .as_array()
        .ok_or("no snapshot")?
        .iter()
        .map(|q| {
            (
                q["pathWeight"].as_u64().unwrap_or(u64::MAX),
                format!("{}{}", q["tail"].as_str().unwrap_or(""), q["head"].as_str().unwrap_or("")),
            )
        })
        .collect();
    let want_snap: Vec<(u64, String)> = [(2, "DB"), (3, "AB"), (3, "DF"), (4, "DB"), (5, "AC"), (8, "DE")]
        .iter()
        .map(|&(w, n)| (w, n.to_string()))
        .collect();
    ensure(snapshot == want_snap, || format!("step II queue {snapshot:?}"))?;
    Ok(format!("{} extractions, 6 accepts, step II queue 2,3,3,4,5,8", seq.len()))
}

fn back_tree_demo() -> Check {
    let v = cli_json(&["sssp", "--input", &fixture("demo.g"), "--source", "A", "--walk", "E"])?;
    let rows = v["vertices"].as_array().ok_or("no vertices")?;
    let back = |label: &str| {
        rows.iter()
            .find(|r| r["label"] == label)
            .map(|r| (r["back"].as_str().map(str::to_string), r["backWeight"].as_u64()))
    };
    ensure(back("A") == Some((None, None)), || format!("A: {:?}", back("A")))?;
    for (child, parent, w) in [("D", "A", 1), ("B", "D", 1), ("F", "D", 2), ("C", "F", 1), ("G", "F", 1), ("E", "G", 0)] {
        let got = back(child);
        ensure(got == Some((Some(parent.to_string()), Some(w))), || format!("{child}: {got:?}"))?;
    }
    let text = v["walk"]["text"].as_str().unwrap_or("");
    ensure(text == "[E]--(0)->[G]--(1)->[F]--(2)->[D]--(1)->[A]", || format!("walk {text}"))?;
    Ok(format!("back map matches, walk(E) = {text}"))
}

fn step_bound() -> Check {
    const OPS: usize = 1_000_000;
    let cfg = PTrieConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut trie = PTrie::new(cfg);
    let mut live: Vec<u64> = Vec::new();
    let (mut max_update, mut max_search_layers, mut peak) = (0, 0, 0);
    let insert = |trie: &mut PTrie<()>, live: &mut Vec<u64>, rng: &mut ChaCha8Rng| {
        let k = rng.gen::<u32>() as u64;
        trie.insert(k, ()).unwrap();
        live.push(k);
    };
    for _ in 0..OPS {
        // Grow to about 10^5 keys, then churn around that size. `live` may
        // hold keys already taken by delete_min; removing one is a miss.
        let grow = trie.len() < 100_000;
        match rng.gen_range(0..10) {
            0..=2 => insert(&mut trie, &mut live, &mut rng),
            3 if grow => insert(&mut trie, &mut live, &mut rng),
            3..=4 => {
                trie.delete_min();
            }
            5..=6 => {
                let k = if live.is_empty() || rng.gen_bool(0.2) {
                    rng.gen::<u32>() as u64
                } else {
                    live.swap_remove(rng.gen_range(0..live.len()))
                };
                trie.remove(k);
            }
            _ => {
                let k = if live.is_empty() || rng.gen_bool(0.5) {
                    rng.gen::<u32>() as u64
                } else {
                    live[rng.gen_range(0..live.len())]
                };
                trie.search(k);
                max_search_layers = max_search_layers.max(trie.last_op_stats().layers_visited);
                continue;
            }
        }
        max_update = max_update.max(trie.last_op_stats().primitive_steps(cfg.stride_bits()));
        ensure(max_update <= 12, || format!("{max_update} steps"))?;
        peak = peak.max(trie.len());
    }
    let s = trie.stats_summary();
    ensure(s.updates().max_steps <= 12, || format!("summary max {}", s.updates().max_steps))?;
    ensure(max_search_layers <= 8 && s.search.max_layers_visited <= 8, || {
        format!("search visited {max_search_layers} layers")
    })?;
    Ok(format!(
        "{OPS} ops, peak {peak} keys: max {} steps per update, max {} layers per search",
        max_update, max_search_layers
    ))
}

fn stability_oracle() -> Check {
    const SEEDS: usize = 100;
    const OPS: usize = 100_000;
    let cfg = PTrieConfig::default();
    let results = par::map_range(Exec::default(), SEEDS, |seed| -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let pool: Vec<u64> = (0..256).map(|_| rng.gen::<u32>() as u64).collect();
        let mut trie = PTrie::new(cfg);
        let mut oracle = StableSortedList::new();
        for i in 0..OPS as u32 {
            let key = if rng.gen_bool(0.8) { pool[rng.gen_range(0..pool.len())] } else { rng.gen::<u32>() as u64 };
            let ok = match rng.gen_range(0..20) {
                0..=6 => {
                    trie.insert(key, i).unwrap();
                    oracle.insert(key, i);
                    true
                }
                7..=12 => trie.delete_min() == oracle.delete_min(),
                13..=16 => trie.remove(key) == oracle.remove(key),
                _ => trie.search(key) == oracle.search(key),
            };
            if !ok {
                return Err(format!("seed {seed}: divergence at op {i}"));
            }
        }
        Ok(())
    });
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{SEEDS} seeds x {OPS} ops, 0 divergences"))
}

fn random_graph(rng: &mut ChaCha8Rng, undirected: bool) -> Graph {
    let n = rng.gen_range(1..=50);
    let mut g = Graph::new(32);
    for i in 0..n {
        g.add_vertex(&format!("v{i}")).unwrap();
    }
    let m = rng.gen_range(0..=4 * n);
    for _ in 0..m {
        let (u, v, w) = (VertexId(rng.gen_range(0..n)), VertexId(rng.gen_range(0..n)), rng.gen_range(0..=15));
        if undirected {
            g.add_edge(u, v, w).unwrap();
        } else {
            g.add_arc(u, v, w).unwrap();
        }
    }
    g
}

fn algorithm_oracles() -> Check {
    const GRAPHS: usize = 1000;
    let cfg = PTrieConfig::default();
    let results = par::map_range(Exec::default(), GRAPHS, |i| -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(8_000 + i as u64);
        let g = random_graph(&mut rng, false);
        let n = g.vertex_count();
        let s = VertexId(rng.gen_range(0..n));
        let arcs = g.arc_triples();
        let fwd = sssp(&g, s, cfg).map_err(|e| e.to_string())?;
        ensure(fwd.dist == dijkstra_heap(n, &arcs, s.0), || format!("graph {i}: sssp"))?;
        let reversed: Vec<_> = arcs.iter().map(|&(t, h, w)| (h, t, w)).collect();
        let back = sdsp(&g, s, cfg).map_err(|e| e.to_string())?;
        ensure(back.dist == dijkstra_heap(n, &reversed, s.0), || format!("graph {i}: sdsp"))?;

        // Kruskal spans a forest; Prim the root's component. Compare on a
        // connected graph by adding a path of heavy edges.
        let mut u = random_graph(&mut rng, true);
        for v in 1..u.vertex_count() {
            u.add_edge(VertexId(v - 1), VertexId(v), rng.gen_range(0..=15)).unwrap();
        }
        let prim = mst_prim(&u, VertexId(0), cfg).map_err(|e| e.to_string())?;
        let k = kruskal(u.vertex_count(), &u.arc_triples());
        ensure(prim.total_weight == k, || format!("graph {i}: prim {} kruskal {k}", prim.total_weight))?;
        ensure(prim.spanned.len() == u.vertex_count(), || format!("graph {i}: not spanning"))
    });
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{GRAPHS} graphs: sssp, sdsp, mst all match"))
}

/// Every assignment of {absent, 0, 1, 2} to the ordered vertex pairs of an
/// `n`-vertex digraph (self-loops never change a distance and are left out).
/// Graphs are indexed in base 4.
/// Only vertex 0 is used as the source: relabelling makes every other
/// choice of source one of the enumerated graphs.
fn sweep(n: usize) -> Result<u64, String> {
    let cfg = PTrieConfig::new(8, 4).unwrap();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let total = 4u64.pow(pairs.len() as u32);
    let mut base = Graph::new(8);
    for i in 0..n {
        base.add_vertex(&i.to_string()).unwrap();
    }
    let indices: Vec<u64> = (0..total).collect();
    let chunks: Vec<Vec<u64>> = indices.chunks(4096).map(<[u64]>::to_vec).collect();
    let results = par::map(Exec::default(), chunks, |chunk| -> Result<(), String> {
        let mut g = base.clone();
        // sssp_in leaves the queue empty, so one trie serves the chunk.
        let mut queue = PTrie::new(cfg);
        for index in chunk {
            g.clear_arcs();
            let mut code = index;
            for &(a, b) in &pairs {
                let state = code % 4;
                code /= 4;
                if state > 0 {
                    g.add_arc(VertexId(a), VertexId(b), state - 1).unwrap();
                }
            }
            let arcs = g.arc_triples();
            let tree = sssp_in(&g, VertexId(0), &mut queue).map_err(|e| e.to_string())?;
            let best = brute_force_all_targets(n, &arcs, 0).map_err(|e| format!("{e:?}"))?;
            for t in 0..n {
                if tree.dist[t] != best[t].map(|b| b.0) {
                    return Err(format!("n={n} graph #{index} target {t}"));
                }
            }
        }
        Ok(())
    });
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(total)
}

fn exhaustive_sweep() -> Check {
    let counts = (1..=4).map(sweep).collect::<Result<Vec<_>, _>>()?;
    Ok(format!("all digraphs with 1..4 vertices: {counts:?} graphs"))
}

fn scaling_flatness() -> Check {
    let cfg = PTrieConfig::default();
    let mut means = Vec::new();
    for n in [1_000, 10_000, 100_000, 1_000_000] {
        let params = BenchParams {
            n,
            config: cfg,
            seed: 10,
            timing: false,
        };
        let report = run_bench(&params, &[QueueKind::Ptrie], Exec::Sequential);
        let steps = report.queues[0].workload_steps.ok_or("no step counts")?;
        ensure(steps.max_steps <= 12, || format!("n={n}: max {}", steps.max_steps))?;
        means.push(steps.mean_steps);
    }
    let (lo, hi) = means.iter().fold((f64::MAX, 0f64), |(lo, hi), &m| (lo.min(m), hi.max(m)));
    ensure(hi / lo < 2.0, || format!("means {means:?}, ratio {:.3}", hi / lo))?;
    Ok(format!(
        "mean steps {:?}, max/min = {:.3}",
        means.iter().map(|m| (m * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
        hi / lo
    ))
}

fn analysis_formulas() -> Check {
    const TRIALS: usize = 1000;
    let cfg = PTrieConfig::default();
    let p = cfg.degree() as u64;
    let mut worst: f64 = 0.0;
    let mut worst_sum_err: f64 = 0.0;
    for n in [16u64, 256, 4096] {
        let sim = simulate_layers(n, cfg, TRIALS, 11 + n, Exec::default()).map_err(|e| e.to_string())?;
        for l in 0..cfg.depth_max() as u32 {
            let expected = expected_layers_at_level(n, p, l).map_err(|e| e.to_string())?;
            let m = sim.per_level[l as usize];
            let z = m.z_score(expected, TRIALS);
            ensure(z <= 3.0, || format!("N={n} level {l}: mean {} expected {expected} se {}", m.mean, m.se))?;
            worst = worst.max(z);
            let sum: f64 = (0..=n).map(|g| prob_exact_occupancy(n, p, l, g).unwrap()).sum();
            worst_sum_err = worst_sum_err.max((sum - 1.0).abs());
        }
    }
    ensure(worst_sum_err <= 1e-9, || format!("occupancy sum off by {worst_sum_err:e}"))?;
    Ok(format!("worst |z| = {worst:.2} over 24 levels, occupancy sum error {worst_sum_err:.1e}"))
}

fn structure_soak() -> Check {
    const OPS: usize = 100_000;
    const SOAK_SIZE: usize = 1000;
    let cfg = PTrieConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pool: Vec<u64> = (0..512).map(|_| rng.gen::<u32>() as u64).collect();
    let mut trie = PTrie::new(cfg);
    for i in 0..OPS {
        let key = if rng.gen_bool(0.7) { pool[rng.gen_range(0..pool.len())] } else { rng.gen::<u32>() as u64 };
        // Hover around SOAK_SIZE entries so each validate() pass stays cheap.
        let insert_below = if trie.len() < SOAK_SIZE { 4 } else { 2 };
        match rng.gen_range(0..10) {
            r if r < insert_below => trie.insert(key, i).unwrap(),
            3..=4 => {
                trie.remove(key);
            }
            5..=6 => {
                trie.delete_min();
            }
            _ => {
                trie.search(key);
            }
        }
        let report = trie.validate();
        ensure(report.is_ok(), || format!("unsigned op {i}: {:?}", report.violation))?;
    }
    let mut signed = SignedPTrie::new(cfg);
    let bound = (1i64 << 31) - 1;
    for i in 0..OPS {
        let v = if rng.gen_bool(0.7) { rng.gen_range(-300..300) } else { rng.gen_range(-bound..=bound) };
        let insert_below = if signed.len() < SOAK_SIZE { 4 } else { 2 };
        match rng.gen_range(0..10) {
            r if r < insert_below => signed.insert(v, i).unwrap(),
            3..=4 => {
                signed.remove(v);
            }
            5..=6 => {
                signed.delete_min();
            }
            _ => {
                signed.search(v);
            }
        }
        let report = signed.validate();
        ensure(report.is_ok(), || format!("signed op {i}: {:?}", report.violation))?;
    }
    Ok(format!("{OPS} unsigned + {OPS} signed ops, validate() clean after each"))
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    check: fn() -> Check,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { name: "fig4 MST total", budget: secs(1), check: mst_fig4 },
        Criterion { name: "fig1 MST edges", budget: secs(1), check: mst_fig1 },
        Criterion { name: "fig6 sssp table", budget: secs(1), check: sssp_fig6 },
        Criterion { name: "demo trace", budget: secs(1), check: trace_demo },
        Criterion { name: "demo back tree and walk", budget: secs(1), check: back_tree_demo },
        Criterion { name: "step bound", budget: secs(30), check: step_bound },
        Criterion { name: "stability oracle", budget: secs(60), check: stability_oracle },
        Criterion { name: "algorithm oracles", budget: secs(60), check: algorithm_oracles },
        Criterion { name: "exhaustive small digraphs", budget: secs(120), check: exhaustive_sweep },
        Criterion { name: "scaling flatness", budget: secs(120), check: scaling_flatness },
        Criterion { name: "analysis formulas", budget: secs(60), check: analysis_formulas },
        Criterion { name: "structure soak", budget: secs(60), check: structure_soak },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = (c.check)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget {:?}", c.budget)),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {:<26} {:>8.2}s  {}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            elapsed.as_secs_f64(),
            detail
        );
    }
    println!("acceptance: {} of {} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

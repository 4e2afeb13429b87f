//! Front end for the `ptrie` binary. [`run`] takes the argument list and
//! returns the exit code with both output streams, so tests can drive it
//! without spawning a process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ptrie_core::analysis::{expected_layers_at_level, expected_total_layers, prob_exact_occupancy, simulate_layers, Moments};
use ptrie_core::bench::{run_bench, BenchParams, BenchReport, QueueKind, StepReport};
use ptrie_core::graph::Graph;
use ptrie_core::mst::mst_prim_in;
use ptrie_core::shortest_paths::{format_walk, sssp_in, walk, PathTree, QueueEntry, TraceEvent};
use ptrie_core::{Exec, PTrie, PTrieConfig, StatsSummary, VertexId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ptrie", version, about = "Stable prefix-tree priority queue and graph algorithms")]
pub struct Cli {
    /// Stride bits K; the trie degree is 2^K.
    #[arg(long, global = true, default_value_t = 4)]
    pub k: u32,
    /// Word bits M; keys and path weights must be below 2^M.
    #[arg(long, global = true, default_value_t = 32)]
    pub m: u32,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum spanning tree of the root's component (Jarnik-Prim).
    Mst {
        #[command(flatten)]
        input: InputArgs,
        /// Root vertex; defaults to the first vertex in the file.
        #[arg(long)]
        root: Option<String>,
    },
    /// Shortest paths from a source.
    Sssp {
        #[command(flatten)]
        input: InputArgs,
        /// Source vertex label
        #[arg(long)]
        source: String,
        #[command(flatten)]
        paths: PathArgs,
    },
    /// Shortest paths into a destination.
    Sdsp {
        #[command(flatten)]
        input: InputArgs,
        /// Destination vertex label
        #[arg(long)]
        dest: String,
        #[command(flatten)]
        paths: PathArgs,
    },
    /// Shortest paths from a source, logging every queue extraction.
    Trace {
        #[command(flatten)]
        input: InputArgs,
        /// Source vertex label
        #[arg(long)]
        source: String,
        /// Print the queue contents before each extraction.
        #[arg(long)]
        verbose: bool,
        #[command(flatten)]
        paths: PathArgs,
    },
    /// Seeded queue benchmark: random insert/delete_min plus Dijkstra.
    Bench {
        /// Workload inserts, each matched by a delete_min
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// Queue implementation to measure
        #[arg(long, value_enum, default_value_t = QueueChoice::Both)]
        queue: QueueChoice,
        /// RNG seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Omit wall-clock figures so the report is reproducible.
        #[arg(long)]
        no_timing: bool,
        /// Run the queue kinds one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Expected layer counts for random keys, checked by simulation.
    Analyze {
        /// Number of random keys.
        #[arg(long, default_value_t = 256)]
        n: u64,
        /// Levels to report; defaults to M/K.
        #[arg(long)]
        levels: Option<u32>,
        /// Simulated tries; 0 reports the formulas only.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// RNG seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Graph file.
    #[arg(long)]
    pub input: PathBuf,
    /// Append queue operation counts.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    /// Also print the back chain from this vertex.
    #[arg(long)]
    pub walk: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QueueChoice {
    Ptrie,
    Heap,
    Both,
}

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type CmdResult = Result<String, Failure>;

pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Output {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(f) => Output {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn execute(cli: &Cli) -> CmdResult {
    let config = PTrieConfig::new(cli.m, cli.k).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let json = cli.json;
    match &cli.command {
        Command::Mst { input, root } => cmd_mst(config, json, input, root.as_deref()),
        Command::Sssp { input, source, paths } => cmd_paths(config, json, input, source, Direction::From, paths),
        Command::Sdsp { input, dest, paths } => cmd_paths(config, json, input, dest, Direction::Into, paths),
        Command::Trace {
            input,
            source,
            verbose,
            paths,
        } => cmd_trace(config, json, input, source, *verbose, paths),
        Command::Bench {
            n,
            queue,
            seed,
            no_timing,
            sequential,
        } => cmd_bench(config, json, *n, *queue, *seed, !*no_timing, *sequential),
        Command::Analyze {
            n,
            levels,
            trials,
            seed,
        } => cmd_analyze(config, json, *n, *levels, *trials, *seed),
    }
}

fn load(path: &Path, config: PTrieConfig) -> Result<Graph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    Graph::parse(&text, config.word_bits()).map_err(|e| fail(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn lookup(g: &Graph, label: &str) -> Result<VertexId, Failure> {
    g.vertex(label)
        .ok_or_else(|| fail(EXIT_INPUT, format!("unknown vertex {label:?}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct QueueStats {
    insert: StepReport,
    remove: StepReport,
    search: StepReport,
}

impl From<StatsSummary> for QueueStats {
    fn from(s: StatsSummary) -> Self {
        Self {
            insert: s.insert.into(),
            remove: s.remove.into(),
            search: s.search.into(),
        }
    }
}

fn stats_text(out: &mut String, stats: &QueueStats) {
    for (name, r) in [("insert", &stats.insert), ("remove", &stats.remove), ("search", &stats.search)] {
        writeln!(
            out,
            "stats {name} ops={} mean_steps={:.3} max_steps={} max_layers={}",
            r.ops, r.mean_steps, r.max_steps, r.max_layers_visited
        )
        .unwrap();
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MstEdgeJson<'a> {
    u: &'a str,
    v: &'a str,
    weight: u64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct MstJson<'a> {
    command: &'static str,
    root: &'a str,
    total_weight: u64,
    edges: Vec<MstEdgeJson<'a>>,
    spanned: Vec<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    queue_stats: Option<QueueStats>,
}

fn cmd_mst(config: PTrieConfig, json: bool, input: &InputArgs, root: Option<&str>) -> CmdResult {
    let g = load(&input.input, config)?;
    let root = match root {
        Some(label) => lookup(&g, label)?,
        None if g.vertex_count() > 0 => VertexId(0),
        None => return Err(fail(EXIT_INPUT, "graph has no vertices")),
    };
    let mut queue = PTrie::new(config);
    let r = mst_prim_in(&g, root, &mut queue).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    if r.edges.len() + 1 != r.spanned.len() || r.total_weight != r.edges.iter().map(|e| e.weight).sum::<u64>() {
        return Err(fail(EXIT_INVARIANT, "spanning tree failed its consistency check"));
    }
    let stats = input.stats.then(|| QueueStats::from(queue.stats_summary()));
    if json {
        return Ok(to_json(&MstJson {
            command: "mst",
            root: g.label(root),
            total_weight: r.total_weight,
            edges: r
                .edges
                .iter()
                .map(|e| MstEdgeJson {
                    u: g.label(e.u),
                    v: g.label(e.v),
                    weight: e.weight,
                })
                .collect(),
            spanned: r.spanned.iter().map(|v| g.label(*v)).collect(),
            queue_stats: stats,
        }));
    }
    let mut out = String::new();
    writeln!(out, "mst root={}", g.label(root)).unwrap();
    for e in &r.edges {
        writeln!(out, "{}-{} {}", g.label(e.u), g.label(e.v), e.weight).unwrap();
    }
    writeln!(out, "total={} spanned={}", r.total_weight, r.spanned.len()).unwrap();
    if let Some(s) = &stats {
        stats_text(&mut out, s);
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    From,
    Into,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct VertexJson<'a> {
    label: &'a str,
    dist: Option<u64>,
    hops: Option<u32>,
    back: Option<&'a str>,
    back_weight: Option<u64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct WalkStepJson<'a> {
    vertex: &'a str,
    back_weight: Option<u64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct WalkJson<'a> {
    target: &'a str,
    reachable: bool,
    path: Vec<WalkStepJson<'a>>,
    text: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PathsJson<'a> {
    command: &'static str,
    source: &'a str,
    vertices: Vec<VertexJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    walk: Option<WalkJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    queue_stats: Option<QueueStats>,
}

fn vertices_json<'a>(g: &'a Graph, tree: &PathTree) -> Vec<VertexJson<'a>> {
    g.vertices()
        .map(|v| VertexJson {
            label: g.label(v),
            dist: tree.dist[v.0],
            hops: tree.hops[v.0],
            back: tree.back[v.0].map(|b| g.label(b.parent)),
            back_weight: tree.back[v.0].map(|b| b.weight),
        })
        .collect()
}

fn walk_json<'a>(g: &'a Graph, tree: &PathTree, target: VertexId) -> WalkJson<'a> {
    let path = walk(tree, target);
    WalkJson {
        target: g.label(target),
        reachable: path.is_some(),
        text: path.as_ref().map(|p| format_walk(g, p)),
        path: path
            .unwrap_or_default()
            .into_iter()
            .map(|(v, w)| WalkStepJson {
                vertex: g.label(v),
                back_weight: w,
            })
            .collect(),
    }
}

fn vertices_text(out: &mut String, g: &Graph, tree: &PathTree) {
    for v in g.vertices() {
        match (tree.dist[v.0], tree.hops[v.0]) {
            (Some(d), Some(h)) => {
                let back = match tree.back[v.0] {
                    Some(b) => format!("{}({})", g.label(b.parent), b.weight),
                    None => "-".to_string(),
                };
                writeln!(out, "{} dist={d} hops={h} back={back}", g.label(v)).unwrap();
            }
            _ => writeln!(out, "{} unreachable", g.label(v)).unwrap(),
        }
    }
}

fn walk_text(out: &mut String, w: &WalkJson) {
    match &w.text {
        Some(t) => writeln!(out, "walk {t}").unwrap(),
        None => writeln!(out, "walk {} unreachable", w.target).unwrap(),
    }
}

/// The settled distances admit no further relaxation.
fn check_tree(g: &Graph, tree: &PathTree) -> Result<(), Failure> {
    for arc in g.all_arcs() {
        if let Some(dt) = tree.dist[arc.tail.0] {
            match tree.dist[arc.head.0] {
                Some(dh) if dh <= dt.saturating_add(arc.weight) => {}
                _ => {
                    return Err(fail(
                        EXIT_INVARIANT,
                        format!("arc {}->{} still relaxes", g.label(arc.tail), g.label(arc.head)),
                    ))
                }
            }
        }
    }
    Ok(())
}

fn cmd_paths(
    config: PTrieConfig,
    json: bool,
    input: &InputArgs,
    label: &str,
    dir: Direction,
    paths: &PathArgs,
) -> CmdResult {
    let original = load(&input.input, config)?;
    let s = lookup(&original, label)?;
    let target = paths.walk.as_deref().map(|l| lookup(&original, l)).transpose()?;
    let g = match dir {
        Direction::From => original,
        Direction::Into => original.reverse(),
    };
    let mut queue = PTrie::new(config);
    let tree = sssp_in(&g, s, &mut queue).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    check_tree(&g, &tree)?;
    let stats = input.stats.then(|| QueueStats::from(queue.stats_summary()));
    let walk = target.map(|t| walk_json(&g, &tree, t));
    let command = if dir == Direction::From { "sssp" } else { "sdsp" };
    if json {
        return Ok(to_json(&PathsJson {
            command,
            source: g.label(s),
            vertices: vertices_json(&g, &tree),
            walk,
            queue_stats: stats,
        }));
    }
    let mut out = String::new();
    let role = if dir == Direction::From { "source" } else { "dest" };
    writeln!(out, "{command} {role}={}", g.label(s)).unwrap();
    vertices_text(&mut out, &g, &tree);
    if let Some(w) = &walk {
        walk_text(&mut out, w);
    }
    if let Some(st) = &stats {
        stats_text(&mut out, st);
    }
    Ok(out)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EntryJson<'a> {
    tail: &'a str,
    head: &'a str,
    weight: u64,
    path_weight: u64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EventJson<'a> {
    step: usize,
    tail: &'a str,
    head: &'a str,
    weight: u64,
    path_weight: u64,
    rejected: bool,
    queue: Vec<EntryJson<'a>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TraceJson<'a> {
    command: &'static str,
    source: &'a str,
    events: Vec<EventJson<'a>>,
    vertices: Vec<VertexJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    walk: Option<WalkJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    queue_stats: Option<QueueStats>,
}

fn entry_json<'a>(g: &'a Graph, e: &QueueEntry) -> EntryJson<'a> {
    EntryJson {
        tail: g.label(e.tail),
        head: g.label(e.head),
        weight: e.weight,
        path_weight: e.path_weight,
    }
}

fn event_json<'a>(g: &'a Graph, e: &TraceEvent) -> EventJson<'a> {
    EventJson {
        step: e.step,
        tail: g.label(e.entry.tail),
        head: g.label(e.entry.head),
        weight: e.entry.weight,
        path_weight: e.entry.path_weight,
        rejected: e.rejected,
        queue: e.queue.iter().map(|q| entry_json(g, q)).collect(),
    }
}

fn cmd_trace(
    config: PTrieConfig,
    json: bool,
    input: &InputArgs,
    label: &str,
    verbose: bool,
    paths: &PathArgs,
) -> CmdResult {
    let g = load(&input.input, config)?;
    let s = lookup(&g, label)?;
    let target = paths.walk.as_deref().map(|l| lookup(&g, l)).transpose()?;
    let (tree, events) = ptrie_core::sssp_trace(&g, s, config).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    check_tree(&g, &tree)?;
    let stats = if input.stats {
        // The traced run snapshots the queue, so count on a clean rerun.
        let mut queue = PTrie::new(config);
        sssp_in(&g, s, &mut queue).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
        Some(QueueStats::from(queue.stats_summary()))
    } else {
        None
    };
    let walk = target.map(|t| walk_json(&g, &tree, t));
    if json {
        return Ok(to_json(&TraceJson {
            command: "trace",
            source: g.label(s),
            events: events.iter().map(|e| event_json(&g, e)).collect(),
            vertices: vertices_json(&g, &tree),
            walk,
            queue_stats: stats,
        }));
    }
    let mut out = String::new();
    for e in &events {
        writeln!(
            out,
            "step={} extract={}->{} w={} {}",
            e.step,
            g.label(e.entry.tail),
            g.label(e.entry.head),
            e.entry.path_weight,
            if e.rejected { "reject" } else { "accept" }
        )
        .unwrap();
        if verbose {
            for q in &e.queue {
                writeln!(out, "    {} {}->{}", q.path_weight, g.label(q.tail), g.label(q.head)).unwrap();
            }
        }
    }
    if let Some(w) = &walk {
        walk_text(&mut out, w);
    }
    if let Some(st) = &stats {
        stats_text(&mut out, st);
    }
    Ok(out)
}

fn cmd_bench(
    config: PTrieConfig,
    json: bool,
    n: usize,
    queue: QueueChoice,
    seed: u64,
    timing: bool,
    sequential: bool,
) -> CmdResult {
    if n == 0 {
        return Err(fail(EXIT_USAGE, "--n must be at least 1"));
    }
    let kinds: &[QueueKind] = match queue {
        QueueChoice::Ptrie => &[QueueKind::Ptrie],
        QueueChoice::Heap => &[QueueKind::Heap],
        QueueChoice::Both => &QueueKind::ALL,
    };
    let exec = if sequential { Exec::Sequential } else { Exec::default() };
    let params = BenchParams { n, config, seed, timing };
    let report = run_bench(&params, kinds, exec);
    if let Some(p) = report.queues.iter().find_map(|q| q.workload_steps) {
        if p.max_steps > config.step_bound() as u64 {
            return Err(fail(EXIT_INVARIANT, format!("step bound {} exceeded", config.step_bound())));
        }
    }
    if json {
        return Ok(to_json(&report));
    }
    Ok(bench_text(&report))
}

fn bench_text(r: &BenchReport) -> String {
    let mut out = String::new();
    writeln!(out, "bench n={} seed={} M={} K={}", r.n, r.seed, r.word_bits, r.stride_bits).unwrap();
    for q in &r.queues {
        let name = match q.queue {
            QueueKind::Ptrie => "ptrie",
            QueueKind::Heap => "heap",
        };
        writeln!(
            out,
            "{name} workload_ops={} checksum={:016x} dijkstra_vertices={} dijkstra_arcs={} reached={} dist_sum={}",
            q.workload_ops, q.extraction_checksum, q.dijkstra_vertices, q.dijkstra_arcs, q.dijkstra_reached, q.dijkstra_dist_sum
        )
        .unwrap();
        for (label, s) in [("workload", q.workload_steps), ("dijkstra", q.dijkstra_steps)] {
            if let Some(s) = s {
                writeln!(
                    out,
                    "{name} {label}_steps mean={:.3} max={} mean_layers={:.3} max_layers={}",
                    s.mean_steps, s.max_steps, s.mean_layers_visited, s.max_layers_visited
                )
                .unwrap();
            }
        }
        if let Some(t) = q.timing {
            writeln!(
                out,
                "{name} timing workload_secs={:.4} ops_per_sec={:.0} dijkstra_secs={:.4}",
                t.workload_secs, t.workload_ops_per_sec, t.dijkstra_secs
            )
            .unwrap();
        }
    }
    out
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct LevelJson {
    level: u32,
    expected_layers: f64,
    occupancy_sum: f64,
    simulated: Option<Moments>,
    z_score: Option<f64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct AnalyzeJson {
    command: &'static str,
    keys: u64,
    degree: u64,
    word_bits: u32,
    stride_bits: u32,
    trials: usize,
    seed: u64,
    levels: Vec<LevelJson>,
    expected_total: f64,
    simulated_total: Option<Moments>,
}

fn cmd_analyze(
    config: PTrieConfig,
    json: bool,
    n: u64,
    levels: Option<u32>,
    trials: usize,
    seed: u64,
) -> CmdResult {
    let depth = config.depth_max() as u32;
    let levels = levels.unwrap_or(depth);
    if levels > depth {
        return Err(fail(EXIT_USAGE, format!("--levels must be at most M/K = {depth}")));
    }
    if trials == 1 {
        return Err(fail(EXIT_USAGE, "--trials must be 0 or at least 2"));
    }
    let p = config.degree() as u64;
    let err = |e: ptrie_core::analysis::AnalysisError| fail(EXIT_USAGE, e.to_string());
    let sim = if trials >= 2 {
        Some(simulate_layers(n, config, trials, seed, Exec::default()).map_err(err)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for l in 0..levels {
        let expected = expected_layers_at_level(n, p, l).map_err(err)?;
        let occupancy_sum = (0..=n).map(|g| prob_exact_occupancy(n, p, l, g)).sum::<Result<f64, _>>().map_err(err)?;
        let simulated = sim.as_ref().map(|s| s.per_level[l as usize]);
        rows.push(LevelJson {
            level: l,
            expected_layers: expected,
            occupancy_sum,
            simulated,
            z_score: simulated.map(|m| m.z_score(expected, trials)),
        });
    }
    let report = AnalyzeJson {
        command: "analyze",
        keys: n,
        degree: p,
        word_bits: config.word_bits(),
        stride_bits: config.stride_bits(),
        trials,
        seed,
        // Over every level, like the simulated total.
        expected_total: expected_total_layers(n, p, depth).map_err(err)?,
        simulated_total: sim.as_ref().map(|s| s.total),
        levels: rows,
    };
    if json {
        return Ok(to_json(&report));
    }
    let mut out = String::new();
    writeln!(out, "analyze n={n} P={p} M={} K={} trials={trials}", config.word_bits(), config.stride_bits()).unwrap();
    for r in &report.levels {
        write!(out, "level={} expected={:.6} occupancy_sum={:.12}", r.level, r.expected_layers, r.occupancy_sum).unwrap();
        if let (Some(m), Some(z)) = (r.simulated, r.z_score) {
            write!(out, " simulated={:.6} se={:.6} z={:.3}", m.mean, m.se, z).unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "total expected={:.6}", report.expected_total).unwrap();
    Ok(out)
}

//! Adjacency-list digraph with labelled vertices and a line-oriented text
//! format.
//!
//! ```text
//! # comment
//! v A
//! v B
//! a A B 3      directed arc A -> B, weight 3
//! e A B 2      undirected edge: arcs A -> B and B -> A, in that order
//! ```
//!
//! Adjacency lists keep insertion (file) order; the algorithms iterate them
//! in that order, which fixes how ties are broken.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex label {0:?} already exists")]
    DuplicateLabel(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("weight {weight} does not fit in {bits} bits")]
    WeightOverflow { weight: u64, bits: u32 },
    #[error("negative weight {0}")]
    NegativeWeight(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown record type {0:?}")]
    UnknownRecord(String),
    #[error("expected {expected} fields, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("invalid weight {0:?}")]
    BadWeight(String),
    #[error("negative weight {0}")]
    NegativeWeight(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    weight_bits: u32,
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    adjacency: Vec<Vec<Arc>>,
}

impl Graph {
    /// Empty graph accepting weights below `2^weight_bits`.
    pub fn new(weight_bits: u32) -> Self {
        Self {
            weight_bits,
            labels: Vec::new(),
            index: HashMap::new(),
            adjacency: Vec::new(),
        }
    }

    pub fn weight_bits(&self) -> u32 {
        self.weight_bits
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.labels.len()).map(VertexId)
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.labels.len()
    }

    /// Outgoing arcs of `v` in insertion order.
    pub fn arcs(&self, v: VertexId) -> &[Arc] {
        &self.adjacency[v.0]
    }

    /// Every arc, grouped by tail in vertex order.
    pub fn all_arcs(&self) -> impl Iterator<Item = &Arc> {
        self.adjacency.iter().flatten()
    }

    pub fn add_vertex(&mut self, label: &str) -> Result<VertexId, GraphError> {
        if self.index.contains_key(label) {
            return Err(GraphError::DuplicateLabel(label.to_string()));
        }
        let id = VertexId(self.labels.len());
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        self.adjacency.push(Vec::new());
        Ok(id)
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(format!("#{}", v.0)))
        }
    }

    fn check_weight(&self, weight: u64) -> Result<(), GraphError> {
        if self.weight_bits < 64 && weight >> self.weight_bits != 0 {
            Err(GraphError::WeightOverflow {
                weight,
                bits: self.weight_bits,
            })
        } else {
            Ok(())
        }
    }

    pub fn add_arc(&mut self, tail: VertexId, head: VertexId, weight: u64) -> Result<(), GraphError> {
        self.check(tail)?;
        self.check(head)?;
        self.check_weight(weight)?;
        self.adjacency[tail.0].push(Arc { tail, head, weight });
        Ok(())
    }

    /// Arc from a signed weight, for callers whose weights are not already
    /// known to be nonnegative.
    pub fn add_signed_arc(&mut self, tail: VertexId, head: VertexId, weight: i64) -> Result<(), GraphError> {
        let w = u64::try_from(weight).map_err(|_| GraphError::NegativeWeight(weight))?;
        self.add_arc(tail, head, w)
    }

    /// Two opposed arcs, `u -> v` then `v -> u`.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, weight: u64) -> Result<(), GraphError> {
        self.check(u)?;
        self.check(v)?;
        self.check_weight(weight)?;
        self.adjacency[u.0].push(Arc { tail: u, head: v, weight });
        self.adjacency[v.0].push(Arc { tail: v, head: u, weight });
        Ok(())
    }

    fn lookup(&self, label: &str) -> Result<VertexId, GraphError> {
        self.vertex(label)
            .ok_or_else(|| GraphError::UnknownVertex(label.to_string()))
    }

    pub fn add_arc_by_label(&mut self, tail: &str, head: &str, weight: u64) -> Result<(), GraphError> {
        let (t, h) = (self.lookup(tail)?, self.lookup(head)?);
        self.add_arc(t, h, weight)
    }

    pub fn add_edge_by_label(&mut self, u: &str, v: &str, weight: u64) -> Result<(), GraphError> {
        let (a, b) = (self.lookup(u)?, self.lookup(v)?);
        self.add_edge(a, b, weight)
    }

    /// Drops every arc and keeps the vertices.
    pub fn clear_arcs(&mut self) {
        self.adjacency.iter_mut().for_each(Vec::clear);
    }

    /// Same vertices with every arc flipped. Arcs are visited tail by tail
    /// in adjacency order, so the reversed lists are deterministic.
    pub fn reverse(&self) -> Graph {
        let mut out = Graph {
            weight_bits: self.weight_bits,
            labels: self.labels.clone(),
            index: self.index.clone(),
            adjacency: vec![Vec::new(); self.labels.len()],
        };
        for arc in self.all_arcs() {
            out.adjacency[arc.head.0].push(Arc {
                tail: arc.head,
                head: arc.tail,
                weight: arc.weight,
            });
        }
        out
    }

    /// Arcs as plain `(tail, head, weight)` index triples.
    pub fn arc_triples(&self) -> Vec<(usize, usize, u64)> {
        self.all_arcs().map(|a| (a.tail.0, a.head.0, a.weight)).collect()
    }

    pub fn parse(text: &str, weight_bits: u32) -> Result<Graph, ParseError> {
        let mut g = Graph::new(weight_bits);
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |kind: ParseErrorKind| ParseError { line, kind };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let want = |expected: usize| {
                if fields.len() == expected {
                    Ok(())
                } else {
                    Err(err(ParseErrorKind::FieldCount {
                        expected,
                        found: fields.len(),
                    }))
                }
            };
            match fields[0] {
                "v" => {
                    want(2)?;
                    g.add_vertex(fields[1]).map_err(|e| err(e.into()))?;
                }
                kind @ ("a" | "e") => {
                    want(4)?;
                    let weight = parse_weight(fields[3]).map_err(err)?;
                    let result = if kind == "a" {
                        g.add_arc_by_label(fields[1], fields[2], weight)
                    } else {
                        g.add_edge_by_label(fields[1], fields[2], weight)
                    };
                    result.map_err(|e| err(e.into()))?;
                }
                other => return Err(err(ParseErrorKind::UnknownRecord(other.to_string()))),
            }
        }
        Ok(g)
    }

    /// `v` records for every vertex, then one `a` record per arc in
    /// adjacency order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for label in &self.labels {
            writeln!(out, "v {label}").unwrap();
        }
        for arc in self.all_arcs() {
            writeln!(
                out,
                "a {} {} {}",
                self.labels[arc.tail.0], self.labels[arc.head.0], arc.weight
            )
            .unwrap();
        }
        out
    }
}

fn parse_weight(token: &str) -> Result<u64, ParseErrorKind> {
    if let Some(rest) = token.strip_prefix('-') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseErrorKind::NegativeWeight(token.to_string()));
        }
    }
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseErrorKind::BadWeight(token.to_string()));
    }
    token.parse().map_err(|_| ParseErrorKind::BadWeight(token.to_string()))
}

//! Directed Hamiltonian metric graphs.
//!
//! A [`MetricDigraph`] is always stored in its canonical labeling: the start
//! vertex is `1` and the Hamiltonian cycle is `1 -> 2 -> ... -> n -> 1`. Each
//! vertex owns exactly one *inner* edge (its edge along that cycle); every
//! other edge is *outer*. The outgoing edges of a vertex are kept in a fixed
//! order with the inner edge last, which is what the cycle-splitting walk
//! relies on.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex label, `1..=n` in the canonical labeling.
pub type VertexId = usize;
/// Edge id, `0..|E|` in input-file order.
pub type EdgeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("graph has no vertices")]
    Empty,
    #[error("edge {edge}: vertex {vertex} is outside 1..={n}")]
    VertexOutOfRange { edge: EdgeId, vertex: usize, n: usize },
    #[error("start vertex {0} is outside the vertex range")]
    StartOutOfRange(usize),
    #[error("edge {edge}: length must be positive, got {value}")]
    NonPositiveLength { edge: EdgeId, value: f64 },
    #[error("edge {edge}: radicand {radicand} is not a positive square-free integer")]
    NotSquareFree { edge: EdgeId, radicand: u64 },
    #[error("edges {first} and {second} have rationally dependent lengths")]
    DependentLengths { first: EdgeId, second: EdgeId },
    #[error("no Hamiltonian cycle")]
    NoHamiltonianCycle,
    #[error("declared Hamiltonian cycle is invalid: {0}")]
    BadHamiltonianCycle(String),
}

/// Exact description of an edge length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LengthKind {
    /// `sqrt(k)` for a square-free positive integer `k`.
    Sqrt(u64),
    /// A plain positive real; rational independence is not certified.
    Literal(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeLength {
    kind: LengthKind,
    value: f64,
}

impl EdgeLength {
    /// Returns `None` unless `k` is positive and square-free.
    pub fn sqrt(k: u64) -> Option<Self> {
        if !is_square_free(k) {
            return None;
        }
        Some(Self {
            kind: LengthKind::Sqrt(k),
            value: (k as f64).sqrt(),
        })
    }

    /// Returns `None` unless `x` is finite and positive.
    pub fn literal(x: f64) -> Option<Self> {
        if !(x.is_finite() && x > 0.0) {
            return None;
        }
        Some(Self {
            kind: LengthKind::Literal(x),
            value: x,
        })
    }

    pub fn kind(&self) -> LengthKind {
        self.kind
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl fmt::Display for EdgeLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LengthKind::Sqrt(k) => write!(f, "sqrt({k})"),
            LengthKind::Literal(x) => write!(f, "{x}"),
        }
    }
}

fn is_square_free(k: u64) -> bool {
    if k == 0 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= k {
        if k.is_multiple_of(d * d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub length: EdgeLength,
}

/// Rule used to order the outer edges leaving a vertex. The inner edge is
/// always placed last regardless of the rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OuterOrder {
    /// Ascending head vertex, ties by input order.
    #[default]
    HeadAscending,
    /// Exact reverse of [`OuterOrder::HeadAscending`].
    HeadDescending,
}

// ---------------------------------------------------------------------------
// JSON document

/// `{"sqrt": k}` or `{"value": x}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthSpec {
    Sqrt(u64),
    Value(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    pub length: LengthSpec,
}

/// On-disk graph description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: usize,
    pub start: usize,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian_cycle: Option<Vec<usize>>,
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }
}

/// Parses and validates a graph document.
pub fn load_graph(text: &str) -> Result<MetricDigraph, GraphError> {
    MetricDigraph::from_document(&GraphDocument::from_json(text)?)
}

// ---------------------------------------------------------------------------

/// A validated directed Hamiltonian metric graph in canonical labeling.
#[derive(Clone, Debug)]
pub struct MetricDigraph {
    n: usize,
    edges: Vec<Edge>,
    inner_edge_of: Vec<EdgeId>,
    is_inner: Vec<bool>,
    out_order: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
    outer_order: OuterOrder,
    /// `original_label[v - 1]` is the input label of canonical vertex `v`.
    original_label: Vec<usize>,
    warnings: Vec<String>,
}

impl MetricDigraph {
    pub fn from_document(doc: &GraphDocument) -> Result<Self, GraphError> {
        let n = doc.vertices;
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if doc.start == 0 || doc.start > n {
            return Err(GraphError::StartOutOfRange(doc.start));
        }

        let mut warnings = Vec::new();
        let mut raw = Vec::with_capacity(doc.edges.len());
        for (id, spec) in doc.edges.iter().enumerate() {
            for v in [spec.from, spec.to] {
                if v == 0 || v > n {
                    return Err(GraphError::VertexOutOfRange { edge: id, vertex: v, n });
                }
            }
            let length = match spec.length {
                LengthSpec::Sqrt(k) => EdgeLength::sqrt(k)
                    .ok_or(GraphError::NotSquareFree { edge: id, radicand: k })?,
                LengthSpec::Value(x) => EdgeLength::literal(x)
                    .ok_or(GraphError::NonPositiveLength { edge: id, value: x })?,
            };
            raw.push((spec.from, spec.to, length));
        }
        check_independence(&raw, &mut warnings)?;

        let cycle = match &doc.hamiltonian_cycle {
            Some(declared) => check_declared_cycle(n, doc.start, &raw, declared)?,
            None => find_hamiltonian_cycle(n, doc.start, &raw).ok_or(GraphError::NoHamiltonianCycle)?,
        };

        // cycle[i] (input label) becomes canonical vertex i + 1
        let mut relabel = vec![0usize; n + 1];
        for (i, &v) in cycle.iter().enumerate() {
            relabel[v] = i + 1;
        }
        let edges = raw
            .iter()
            .enumerate()
            .map(|(id, &(from, to, length))| Edge {
                id,
                tail: relabel[from],
                head: relabel[to],
                length,
            })
            .collect();
        let mut g = Self::assemble(n, edges, cycle, warnings);
        g.apply_order(OuterOrder::default());
        Ok(g)
    }

    fn assemble(n: usize, edges: Vec<Edge>, original_label: Vec<usize>, warnings: Vec<String>) -> Self {
        let mut inner_edge_of = vec![usize::MAX; n];
        let mut is_inner = vec![false; edges.len()];
        let mut in_edges = vec![Vec::new(); n];
        for e in &edges {
            in_edges[e.head - 1].push(e.id);
            // earliest parallel candidate wins
            if e.head == next_vertex(e.tail, n) && inner_edge_of[e.tail - 1] == usize::MAX {
                inner_edge_of[e.tail - 1] = e.id;
                is_inner[e.id] = true;
            }
        }
        debug_assert!(inner_edge_of.iter().all(|&e| e != usize::MAX));
        Self {
            n,
            edges,
            inner_edge_of,
            is_inner,
            out_order: vec![Vec::new(); n],
            in_edges,
            outer_order: OuterOrder::default(),
            original_label,
            warnings,
        }
    }

    /// Returns a copy whose per-vertex edge order follows `order`.
    pub fn classify_and_order(&self, order: OuterOrder) -> Self {
        let mut g = self.clone();
        g.apply_order(order);
        g
    }

    fn apply_order(&mut self, order: OuterOrder) {
        for v in 1..=self.n {
            let mut outer: Vec<EdgeId> = self
                .edges
                .iter()
                .filter(|e| e.tail == v && !self.is_inner[e.id])
                .map(|e| e.id)
                .collect();
            outer.sort_by_key(|&id| (self.edges[id].head, id));
            if order == OuterOrder::HeadDescending {
                outer.reverse();
            }
            outer.push(self.inner_edge_of[v - 1]);
            self.out_order[v - 1] = outer;
        }
        self.outer_order = order;
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Always `1`.
    pub fn start(&self) -> VertexId {
        1
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn betti(&self) -> usize {
        self.edges.len() + 1 - self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn length(&self, id: EdgeId) -> f64 {
        self.edges[id].length.value()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length.value()).sum()
    }

    pub fn is_inner(&self, id: EdgeId) -> bool {
        self.is_inner[id]
    }

    pub fn inner_edge_of(&self, v: VertexId) -> EdgeId {
        self.inner_edge_of[v - 1]
    }

    /// Outgoing edges of `v`, inner edge last.
    pub fn out_order(&self, v: VertexId) -> &[EdgeId] {
        &self.out_order[v - 1]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v - 1]
    }

    pub fn outer_order(&self) -> OuterOrder {
        self.outer_order
    }

    /// Input label of canonical vertex `v`.
    pub fn original_label(&self, v: VertexId) -> usize {
        self.original_label[v - 1]
    }

    /// The Hamiltonian cycle in input labels, starting at the start vertex.
    pub fn hamiltonian_cycle(&self) -> &[usize] {
        &self.original_label
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

fn next_vertex(v: VertexId, n: usize) -> VertexId {
    if v == n {
        1
    } else {
        v + 1
    }
}

fn check_independence(raw: &[(usize, usize, EdgeLength)], warnings: &mut Vec<String>) -> Result<(), GraphError> {
    let mut literal_seen = false;
    for (i, (_, _, a)) in raw.iter().enumerate() {
        for (j, (_, _, b)) in raw.iter().enumerate().skip(i + 1) {
            let dependent = match (a.kind(), b.kind()) {
                (LengthKind::Sqrt(x), LengthKind::Sqrt(y)) => x == y,
                (LengthKind::Literal(x), LengthKind::Literal(y)) => x == y,
                _ => false,
            };
            if dependent {
                return Err(GraphError::DependentLengths { first: i, second: j });
            }
        }
        literal_seen |= matches!(a.kind(), LengthKind::Literal(_));
    }
    if literal_seen {
        warnings.push(
            "literal edge lengths present: rational independence of lengths is not certified".to_string(),
        );
    }
    Ok(())
}

fn successors(n: usize, raw: &[(usize, usize, EdgeLength)]) -> Vec<BTreeSet<usize>> {
    let mut succ = vec![BTreeSet::new(); n + 1];
    for &(from, to, _) in raw {
        succ[from].insert(to);
    }
    succ
}

fn check_declared_cycle(
    n: usize,
    start: usize,
    raw: &[(usize, usize, EdgeLength)],
    declared: &[usize],
) -> Result<Vec<usize>, GraphError> {
    let bad = |msg: String| Err(GraphError::BadHamiltonianCycle(msg));
    if declared.len() != n {
        return bad(format!("expected {n} vertices, got {}", declared.len()));
    }
    let mut seen = vec![false; n + 1];
    for &v in declared {
        if v == 0 || v > n || seen[v] {
            return bad(format!("vertex {v} is out of range or repeated"));
        }
        seen[v] = true;
    }
    let succ = successors(n, raw);
    for i in 0..n {
        let (a, b) = (declared[i], declared[(i + 1) % n]);
        if !succ[a].contains(&b) {
            return bad(format!("no edge {a} -> {b}"));
        }
    }
    let at = declared.iter().position(|&v| v == start).expect("permutation contains start");
    let mut cycle = declared[at..].to_vec();
    cycle.extend_from_slice(&declared[..at]);
    Ok(cycle)
}

/// Lexicographically smallest Hamiltonian cycle beginning at `start`.
fn find_hamiltonian_cycle(n: usize, start: usize, raw: &[(usize, usize, EdgeLength)]) -> Option<Vec<usize>> {
    let succ = successors(n, raw);

    fn extend(succ: &[BTreeSet<usize>], n: usize, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let last = *path.last().unwrap();
        if path.len() == n {
            return succ[last].contains(&path[0]);
        }
        for &w in &succ[last] {
            if used[w] {
                continue;
            }
            used[w] = true;
            path.push(w);
            if extend(succ, n, path, used) {
                return true;
            }
            path.pop();
            used[w] = false;
        }
        false
    }

    let mut path = vec![start];
    let mut used = vec![false; n + 1];
    used[start] = true;
    extend(&succ, n, &mut path, &mut used).then_some(path)
}

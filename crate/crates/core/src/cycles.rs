//! Circulations, the cycle-splitting algorithm, and reachable cycle tuples.
//!
//! The splitting algorithm peels a [`Circulation`] into simple cycles. Each
//! iteration walks from vertex 1 along the first unmarked edge at every
//! vertex until a vertex repeats, subtracts the resulting cycle as many times
//! as the residual weights allow, and then marks the first zero outer edge on
//! that cycle. It stops at the inner cycle. On a graph with Betti number `β`
//! this always takes exactly `β` iterations and leaves nothing behind.
//!
//! Running the same walk/mark process without weights, branching over which
//! outer edge gets marked, yields the *complete tuples*. Their subsequences
//! that the splitting algorithm reproduces from their own time form the sets
//! `D_k` of reachable tuples, from which entry times of vertex 1 are counted.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EdgeId, MetricDigraph, VertexId};
use crate::time::{CountOverflow, TimeVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("walk is stuck at vertex {0}: every outgoing edge is marked")]
    Stuck(VertexId),
    #[error("weights are not in H: flow is not conserved at vertex {0}")]
    NotConserved(VertexId),
    #[error("weight vector has {got} entries, graph has {expected} edges")]
    WrongLength { expected: usize, got: usize },
    #[error("edges {0:?} do not form a simple directed cycle")]
    NotSimpleCycle(Vec<EdgeId>),
    #[error("splitting left a cycle without a zero outer edge")]
    NoZeroOuterEdge,
    #[error("splitting did not terminate within β iterations")]
    TooManyIterations,
    #[error(transparent)]
    Overflow(#[from] CountOverflow),
}

// ---------------------------------------------------------------------------
// Cycles

/// A simple directed cycle, stored rotated so its smallest vertex comes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    edges: Vec<EdgeId>,
    is_inner: bool,
}

impl Cycle {
    /// Builds a cycle from edges listed in traversal order (any rotation).
    pub fn from_edges(g: &MetricDigraph, edges: &[EdgeId]) -> Result<Self, CycleError> {
        let bad = || CycleError::NotSimpleCycle(edges.to_vec());
        if edges.is_empty() || edges.iter().any(|&e| e >= g.edge_count()) {
            return Err(bad());
        }
        let mut seen = BTreeSet::new();
        for (i, &e) in edges.iter().enumerate() {
            let next = edges[(i + 1) % edges.len()];
            if g.edge(e).head != g.edge(next).tail || !seen.insert(g.edge(e).tail) {
                return Err(bad());
            }
        }
        let first = (0..edges.len())
            .min_by_key(|&i| g.edge(edges[i]).tail)
            .expect("non-empty");
        let mut rotated = edges[first..].to_vec();
        rotated.extend_from_slice(&edges[..first]);
        let is_inner = rotated.iter().all(|&e| g.is_inner(e));
        Ok(Self { edges: rotated, is_inner })
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn is_inner(&self) -> bool {
        self.is_inner
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertex sequence starting at the smallest vertex.
    pub fn vertices(&self, g: &MetricDigraph) -> Vec<VertexId> {
        self.edges.iter().map(|&e| g.edge(e).tail).collect()
    }

    /// Edge-indicator vector; the exact time of one traversal.
    pub fn time_vector(&self, g: &MetricDigraph) -> TimeVector {
        let mut counts = vec![0; g.edge_count()];
        for &e in &self.edges {
            counts[e] = 1;
        }
        TimeVector::from_counts(counts)
    }

    pub fn time(&self, g: &MetricDigraph) -> f64 {
        self.edges.iter().map(|&e| g.length(e)).sum()
    }
}

/// Every simple directed cycle of `g`, parallel edges giving distinct cycles.
pub fn simple_cycles(g: &MetricDigraph) -> Vec<Cycle> {
    fn extend(
        g: &MetricDigraph,
        root: VertexId,
        v: VertexId,
        path: &mut Vec<EdgeId>,
        on_path: &mut [bool],
        out: &mut Vec<Cycle>,
    ) {
        for &e in g.out_order(v) {
            let w = g.edge(e).head;
            if w < root {
                continue;
            }
            path.push(e);
            if w == root {
                out.push(Cycle::from_edges(g, path).expect("closed simple path"));
            } else if !on_path[w] {
                on_path[w] = true;
                extend(g, root, w, path, on_path, out);
                on_path[w] = false;
            }
            path.pop();
        }
    }

    let mut out = Vec::new();
    let mut on_path = vec![false; g.vertex_count() + 1];
    for root in 1..=g.vertex_count() {
        on_path[root] = true;
        extend(g, root, root, &mut Vec::new(), &mut on_path, &mut out);
        on_path[root] = false;
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Circulations

/// Non-negative integer edge weights conserving flow at every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circulation {
    weights: Vec<u32>,
}

impl Circulation {
    pub fn new(g: &MetricDigraph, weights: Vec<u32>) -> Result<Self, CycleError> {
        if weights.len() != g.edge_count() {
            return Err(CycleError::WrongLength { expected: g.edge_count(), got: weights.len() });
        }
        if let Some(v) = unbalanced_vertex(g, &weights) {
            return Err(CycleError::NotConserved(v));
        }
        Ok(Self { weights })
    }

    pub fn zero(g: &MetricDigraph) -> Self {
        Self { weights: vec![0; g.edge_count()] }
    }

    pub fn from_cycle(g: &MetricDigraph, c: &Cycle, multiplicity: u32) -> Self {
        let mut weights = vec![0; g.edge_count()];
        for &e in c.edges() {
            weights[e] = multiplicity;
        }
        Self { weights }
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self, CycleError> {
        let sum = TimeVector::from_counts(self.weights.clone())
            .add(&TimeVector::from_counts(other.weights.clone()))?;
        Ok(Self { weights: sum.into_counts() })
    }

    pub fn scale(&self, k: u32) -> Result<Self, CycleError> {
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(edge, w)| w.checked_mul(k).ok_or(CountOverflow { edge }))
            .collect::<Result<_, _>>()?;
        Ok(Self { weights })
    }

    /// The time of the circulation as a count vector.
    pub fn time_vector(&self) -> TimeVector {
        TimeVector::from_counts(self.weights.clone())
    }
}

fn unbalanced_vertex(g: &MetricDigraph, weights: &[u32]) -> Option<VertexId> {
    let mut balance = vec![0i64; g.vertex_count() + 1];
    for e in g.edges() {
        balance[e.tail] -= i64::from(weights[e.id]);
        balance[e.head] += i64::from(weights[e.id]);
    }
    (1..=g.vertex_count()).find(|&v| balance[v] != 0)
}

/// A random non-negative combination of the simple cycles of `g`, each
/// coefficient drawn uniformly from `0..=bound`.
pub fn random_circulation(g: &MetricDigraph, seed: u64, bound: u32) -> Circulation {
    let cycles = simple_cycles(g);
    random_circulation_from(g, &cycles, &mut ChaCha8Rng::seed_from_u64(seed), bound)
}

/// As [`random_circulation`], reusing a precomputed cycle list and RNG.
pub fn random_circulation_from<R: Rng>(g: &MetricDigraph, cycles: &[Cycle], rng: &mut R, bound: u32) -> Circulation {
    let mut weights = vec![0u32; g.edge_count()];
    for c in cycles {
        let k = rng.gen_range(0..=bound);
        for &e in c.edges() {
            weights[e] += k;
        }
    }
    Circulation { weights }
}

// ---------------------------------------------------------------------------
// Marks and the walk

/// Set of marked outer edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkState {
    marked: Vec<bool>,
}

impl MarkState {
    pub fn new(g: &MetricDigraph) -> Self {
        Self { marked: vec![false; g.edge_count()] }
    }

    pub fn is_marked(&self, e: EdgeId) -> bool {
        self.marked[e]
    }

    /// Marks an outer edge. Inner edges can never be marked.
    pub fn mark(&mut self, g: &MetricDigraph, e: EdgeId) {
        assert!(!g.is_inner(e), "inner edge {e} cannot be marked");
        self.marked[e] = true;
    }

    pub fn unmark(&mut self, e: EdgeId) {
        self.marked[e] = false;
    }

    pub fn marked(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.marked.iter().enumerate().filter(|(_, &m)| m).map(|(e, _)| e)
    }

    /// First unmarked outer edge leaving `v`, if any.
    pub fn first_unmarked_outer(&self, g: &MetricDigraph, v: VertexId) -> Option<EdgeId> {
        g.out_order(v).iter().copied().find(|&e| !g.is_inner(e) && !self.marked[e])
    }
}

/// Walks from vertex 1 and returns the closing loop in walk order, starting
/// at the vertex where the walk closed.
fn walk_loop(g: &MetricDigraph, marks: &MarkState) -> Result<Vec<EdgeId>, CycleError> {
    let mut position = vec![usize::MAX; g.vertex_count() + 1];
    let mut path: Vec<EdgeId> = Vec::new();
    let mut v = g.start();
    loop {
        position[v] = path.len();
        let e = g
            .out_order(v)
            .iter()
            .copied()
            .find(|&e| !marks.is_marked(e))
            .ok_or(CycleError::Stuck(v))?;
        path.push(e);
        v = g.edge(e).head;
        if position[v] != usize::MAX {
            return Ok(path.split_off(position[v]));
        }
    }
}

/// One walk from vertex 1 along first unmarked edges, returning the loop it
/// closes.
pub fn step1_walk(g: &MetricDigraph, marks: &MarkState) -> Result<Cycle, CycleError> {
    let edges = walk_loop(g, marks)?;
    Cycle::from_edges(g, &edges)
}

// ---------------------------------------------------------------------------
// Splitting

/// Cycles with positive multiplicities, in the order they were produced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightedCycleTuple {
    items: Vec<(Cycle, u32)>,
}

impl WeightedCycleTuple {
    /// Zero-multiplicity entries are dropped.
    pub fn new(items: Vec<(Cycle, u32)>) -> Self {
        Self { items: items.into_iter().filter(|(_, a)| *a > 0).collect() }
    }

    /// Every cycle of `tuple` with multiplicity one.
    pub fn unit(tuple: &CycleTuple) -> Self {
        Self::new(tuple.cycles().iter().map(|c| (c.clone(), 1)).collect())
    }

    pub fn items(&self) -> &[(Cycle, u32)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn cycles(&self) -> CycleTuple {
        CycleTuple::new(self.items.iter().map(|(c, _)| c.clone()).collect())
    }

    /// `Σ a_i · vec(c_i)`.
    pub fn time_vector(&self, g: &MetricDigraph) -> Result<TimeVector, CountOverflow> {
        self.items
            .iter()
            .try_fold(TimeVector::zero(g.edge_count()), |acc, (c, a)| acc.add_scaled(&c.time_vector(g), *a))
    }
}

/// Full record of one run of the splitting algorithm.
#[derive(Clone, Debug)]
pub struct SplitTrace {
    /// One entry per iteration, including zero multiplicities.
    pub iterations: Vec<(Cycle, u32)>,
    /// Outer edges in the order they were marked.
    pub marked: Vec<EdgeId>,
    /// Weights left after the final iteration.
    pub residual: Vec<u32>,
}

impl SplitTrace {
    pub fn tuple(&self) -> WeightedCycleTuple {
        WeightedCycleTuple::new(self.iterations.clone())
    }
}

/// Runs the splitting algorithm and records every iteration.
pub fn sigma_trace(g: &MetricDigraph, h: &Circulation) -> Result<SplitTrace, CycleError> {
    if h.weights.len() != g.edge_count() {
        return Err(CycleError::WrongLength { expected: g.edge_count(), got: h.weights.len() });
    }
    if let Some(v) = unbalanced_vertex(g, &h.weights) {
        return Err(CycleError::NotConserved(v));
    }
    let mut residual = h.weights.clone();
    let mut marks = MarkState::new(g);
    let mut iterations = Vec::with_capacity(g.betti());
    let mut marked = Vec::new();
    loop {
        if iterations.len() == g.betti() {
            return Err(CycleError::TooManyIterations);
        }
        let walk = walk_loop(g, &marks)?;
        let multiplicity = walk.iter().map(|&e| residual[e]).min().expect("cycles are non-empty");
        for &e in &walk {
            residual[e] -= multiplicity;
        }
        let cycle = Cycle::from_edges(g, &walk)?;
        let inner = cycle.is_inner();
        iterations.push((cycle, multiplicity));
        if inner {
            break;
        }
        let zero_outer = walk
            .iter()
            .copied()
            .find(|&e| !g.is_inner(e) && residual[e] == 0)
            .ok_or(CycleError::NoZeroOuterEdge)?;
        marks.mark(g, zero_outer);
        marked.push(zero_outer);
    }
    Ok(SplitTrace { iterations, marked, residual })
}

/// The splitting map from circulations to weighted cycle tuples.
pub fn sigma_split(g: &MetricDigraph, h: &Circulation) -> Result<WeightedCycleTuple, CycleError> {
    sigma_trace(g, h).map(|t| t.tuple())
}

/// Reads a time vector as edge weights; fails when the weights are not a
/// circulation.
pub fn omega(g: &MetricDigraph, counts: &TimeVector) -> Result<Circulation, CycleError> {
    Circulation::new(g, counts.counts().to_vec())
}

/// Splits the circulation of a time. The result has the same time vector.
pub fn mu(g: &MetricDigraph, counts: &TimeVector) -> Result<WeightedCycleTuple, CycleError> {
    sigma_split(g, &omega(g, counts)?)
}

// ---------------------------------------------------------------------------
// Tuples

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleTuple {
    cycles: Vec<Cycle>,
}

impl CycleTuple {
    pub fn new(cycles: Vec<Cycle>) -> Self {
        Self { cycles }
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Numeric cycle times `t(d_1), ..., t(d_k)`.
    pub fn cycle_times(&self, g: &MetricDigraph) -> Vec<f64> {
        self.cycles.iter().map(|c| c.time(g)).collect()
    }

    /// Sum of the cycle indicator vectors.
    pub fn time_vector(&self, g: &MetricDigraph) -> Result<TimeVector, CountOverflow> {
        WeightedCycleTuple::unit(self).time_vector(g)
    }

    /// `Σ b_i · vec(d_i)`.
    pub fn weighted(&self, multiplicities: &[u32]) -> WeightedCycleTuple {
        assert_eq!(multiplicities.len(), self.len());
        WeightedCycleTuple::new(self.cycles.iter().cloned().zip(multiplicities.iter().copied()).collect())
    }

    fn subsequence(&self, mask: u64) -> Self {
        Self {
            cycles: self
                .cycles
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect(),
        }
    }
}

impl fmt::Display for CycleTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.cycles.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{:?}", c.edges())?;
        }
        Ok(())
    }
}

/// All complete tuples of generated cycles, each of length `β`.
pub fn enumerate_complete_tuples(g: &MetricDigraph) -> BTreeSet<CycleTuple> {
    fn explore(g: &MetricDigraph, marks: &mut MarkState, acc: &mut Vec<Cycle>, out: &mut BTreeSet<CycleTuple>) {
        let cycle = step1_walk(g, marks).expect("inner edges are never marked, so the walk cannot stick");
        let inner = cycle.is_inner();
        acc.push(cycle);
        if inner {
            out.insert(CycleTuple::new(acc.clone()));
        } else {
            let vertices = acc.last().unwrap().vertices(g);
            for v in vertices {
                if let Some(e) = marks.first_unmarked_outer(g, v) {
                    marks.mark(g, e);
                    explore(g, marks, acc, out);
                    marks.unmark(e);
                }
            }
        }
        acc.pop();
    }

    let mut out = BTreeSet::new();
    explore(g, &mut MarkState::new(g), &mut Vec::new(), &mut out);
    out
}

/// Reachable tuples grouped by length: `sets[k - 1]` is `D_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReachableTuples {
    sets: Vec<BTreeSet<CycleTuple>>,
}

impl ReachableTuples {
    pub fn beta(&self) -> usize {
        self.sets.len()
    }

    /// `D_k` for `1 <= k <= β`.
    pub fn d(&self, k: usize) -> &BTreeSet<CycleTuple> {
        &self.sets[k - 1]
    }

    /// `(k, D_k)` for every `k`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &BTreeSet<CycleTuple>)> {
        self.sets.iter().enumerate().map(|(i, s)| (i + 1, s))
    }

    pub fn total(&self) -> usize {
        self.sets.iter().map(BTreeSet::len).sum()
    }
}

/// Whether the edges carrying positive weight form one connected piece that
/// contains vertex 1. For a circulation this is the Euler-circuit condition.
pub fn support_touches_start(g: &MetricDigraph, weights: &[u32]) -> bool {
    let mut parent: Vec<usize> = (0..=g.vertex_count()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut touched = vec![false; g.vertex_count() + 1];
    for e in g.edges().iter().filter(|e| weights[e.id] > 0) {
        touched[e.tail] = true;
        touched[e.head] = true;
        let (a, b) = (find(&mut parent, e.tail), find(&mut parent, e.head));
        parent[a] = b;
    }
    if !touched[g.start()] {
        return false;
    }
    let root = find(&mut parent, g.start());
    (1..=g.vertex_count()).filter(|&v| touched[v]).all(|v| find(&mut parent, v) == root)
}

/// Whether a generated tuple is reachable: its unit-weight time is an entry
/// time of vertex 1 and splitting that time gives the tuple back.
pub fn is_reachable(g: &MetricDigraph, tuple: &CycleTuple) -> Result<bool, CycleError> {
    let t = tuple.time_vector(g)?;
    if !support_touches_start(g, t.counts()) {
        return Ok(false);
    }
    Ok(mu(g, &t)? == WeightedCycleTuple::unit(tuple))
}

/// `D_1, ..., D_β` built from the subsequences of the given complete tuples.
pub fn enumerate_reachable_tuples(g: &MetricDigraph, complete: &BTreeSet<CycleTuple>) -> ReachableTuples {
    let beta = g.betti();
    assert!(beta < 64, "β = {beta} is beyond subsequence enumeration");
    let mut sets = vec![BTreeSet::new(); beta];
    let mut checked: HashMap<CycleTuple, bool> = HashMap::new();
    for tuple in complete {
        debug_assert_eq!(tuple.len(), beta);
        for mask in 1u64..(1u64 << tuple.len()) {
            let s = tuple.subsequence(mask);
            let reachable = *checked
                .entry(s.clone())
                .or_insert_with(|| is_reachable(g, &s).expect("sums of cycles are circulations"));
            if reachable {
                sets[s.len() - 1].insert(s);
            }
        }
    }
    ReachableTuples { sets }
}

/// Convenience: complete tuples followed by reachable-set construction.
pub fn reachable_tuples(g: &MetricDigraph) -> ReachableTuples {
    enumerate_reachable_tuples(g, &enumerate_complete_tuples(g))
}

/// Rank over ℚ of the cycle indicator vectors of a tuple.
pub fn indicator_rank(g: &MetricDigraph, tuple: &CycleTuple) -> usize {
    let rows: Vec<Vec<i128>> = tuple
        .cycles()
        .iter()
        .map(|c| c.time_vector(g).counts().iter().map(|&x| i128::from(x)).collect())
        .collect();
    integer_rank(rows)
}

/// Fraction-free Gaussian elimination.
fn integer_rank(mut rows: Vec<Vec<i128>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail {
            let (p, q) = (pivot_row[col], row[col]);
            if q == 0 {
                continue;
            }
            for (x, &y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = *x * p - y * q;
            }
            let g = row.iter().fold(0i128, |acc, &x| gcd(acc, x.abs()));
            if g > 1 {
                row.iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `|D_k|` per `k`, for reporting.
pub fn tuple_counts(d: &ReachableTuples) -> BTreeMap<usize, usize> {
    d.iter().map(|(k, s)| (k, s.len())).collect()
}

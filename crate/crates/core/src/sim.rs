//! Exact discrete-event simulation of point propagation.
//!
//! At time zero a point leaves vertex 1 along every outgoing edge. Whenever
//! points reach a vertex, they vanish and one new point leaves along every
//! outgoing edge; points arriving at the same vertex at the same instant
//! merge into one. Arrival times are [`TimeVector`]s, so "the same instant"
//! is decided exactly. Events are expanded in numeric time order; every
//! predecessor of an event is strictly earlier, so all copies of an event are
//! queued before the first copy is popped and duplicates pop back to back.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::graph::{EdgeId, MetricDigraph, VertexId};
use crate::time::{numeric_counts, CountOverflow, TimeVector};

/// Default bound on the number of logged events.
pub const DEFAULT_EVENT_CAP: usize = 10_000_000;

/// Distance to the horizon below which an event time is reported as close.
pub const NEAR_HORIZON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("horizon must be a finite non-negative number, got {0}")]
    BadHorizon(f64),
    #[error("event cap of {cap} exceeded before reaching T = {horizon}; raise it with --event-cap or CYCLECOUNT_EVENT_CAP")]
    CapExceeded { cap: usize, horizon: f64 },
    #[error(transparent)]
    Overflow(#[from] CountOverflow),
    #[error("query time {query} is beyond the simulated horizon {horizon}")]
    BeyondHorizon { query: f64, horizon: f64 },
    #[error("segment [{r}, {r} + {tau}) does not fit on edge {edge} of length {length}")]
    SegmentOutOfBounds { edge: EdgeId, r: f64, tau: f64, length: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub vertex: VertexId,
    pub time: TimeVector,
    pub numeric_time: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SimulationOptions {
    pub event_cap: usize,
    /// Keep every event's count vector. Counting queries only need event
    /// times, so long sweeps can turn this off to save memory.
    pub record_vectors: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self { event_cap: DEFAULT_EVENT_CAP, record_vectors: true }
    }
}

impl SimulationOptions {
    pub fn with_cap(event_cap: usize) -> Self {
        Self { event_cap, ..Self::default() }
    }

    /// Times only; see [`SimulationOptions::record_vectors`].
    pub fn counts_only(event_cap: usize) -> Self {
        Self { event_cap, record_vectors: false }
    }
}

struct Pending {
    numeric: f64,
    vertex: VertexId,
    counts: Box<[u32]>,
}

impl Pending {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.numeric
            .total_cmp(&other.numeric)
            .then(self.vertex.cmp(&other.vertex))
            .then_with(|| self.counts.cmp(&other.counts))
    }
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    // min-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// All arrival events with time at most the horizon, seed included.
#[derive(Clone, Debug)]
pub struct EventLog {
    horizon: f64,
    len: usize,
    /// Sorted event times per vertex (index `v - 1`), seed included.
    per_vertex: Vec<Vec<f64>>,
    trace: Option<Trace>,
}

/// Events in increasing time order; count vectors live in one flat buffer
/// with stride `|E|`.
#[derive(Clone, Debug)]
struct Trace {
    edge_count: usize,
    vertices: Vec<VertexId>,
    times: Vec<f64>,
    counts: Vec<u32>,
}

/// Simulates up to `horizon` with the default event cap.
pub fn simulate(g: &MetricDigraph, horizon: f64) -> Result<EventLog, SimulationError> {
    simulate_with(g, horizon, &SimulationOptions::default())
}

pub fn simulate_with(g: &MetricDigraph, horizon: f64, options: &SimulationOptions) -> Result<EventLog, SimulationError> {
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(SimulationError::BadHorizon(horizon));
    }
    let m = g.edge_count();
    let mut log = EventLog {
        horizon,
        len: 0,
        per_vertex: vec![Vec::new(); g.vertex_count()],
        trace: options.record_vectors.then(|| Trace {
            edge_count: m,
            vertices: Vec::new(),
            times: Vec::new(),
            counts: Vec::new(),
        }),
    };
    let mut queue = BinaryHeap::new();
    queue.push(Pending {
        numeric: 0.0,
        vertex: g.start(),
        counts: vec![0; m].into_boxed_slice(),
    });
    let mut last: Option<Pending> = None;

    while let Some(event) = queue.pop() {
        if event.numeric > horizon {
            break;
        }
        if last.as_ref().is_some_and(|prev| *prev == event) {
            continue;
        }
        if log.len == options.event_cap {
            return Err(SimulationError::CapExceeded { cap: options.event_cap, horizon });
        }
        for &e in g.out_order(event.vertex) {
            let mut counts = event.counts.clone();
            counts[e] = counts[e].checked_add(1).ok_or(CountOverflow { edge: e })?;
            let numeric = numeric_counts(&counts, g);
            if numeric <= horizon {
                queue.push(Pending { numeric, vertex: g.edge(e).head, counts });
            }
        }
        if let Some(trace) = log.trace.as_mut() {
            trace.vertices.push(event.vertex);
            trace.times.push(event.numeric);
            trace.counts.extend_from_slice(&event.counts);
        }
        log.per_vertex[event.vertex - 1].push(event.numeric);
        log.len += 1;
        last = Some(event);
    }
    Ok(log)
}

impl EventLog {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of events, seed included.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Whether count vectors were kept.
    pub fn has_vectors(&self) -> bool {
        self.trace.is_some()
    }

    fn trace(&self) -> &Trace {
        self.trace.as_ref().expect("event vectors were not recorded for this log")
    }

    /// The `i`-th event in time order. Panics if vectors were not recorded.
    pub fn event(&self, i: usize) -> Event {
        let trace = self.trace();
        let m = trace.edge_count;
        Event {
            vertex: trace.vertices[i],
            time: TimeVector::from_counts(trace.counts[i * m..(i + 1) * m].to_vec()),
            numeric_time: trace.times[i],
        }
    }

    /// Events in time order. Panics if vectors were not recorded.
    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        (0..self.len()).map(|i| self.event(i))
    }

    fn check_query(&self, t: f64) -> Result<(), SimulationError> {
        if t > self.horizon {
            return Err(SimulationError::BeyondHorizon { query: t, horizon: self.horizon });
        }
        Ok(())
    }

    /// Entries into `x` at times `<= t`; the seed departure is not an entry.
    pub fn n_x_at(&self, x: VertexId, t: f64) -> Result<u64, SimulationError> {
        self.check_query(t)?;
        let times = &self.per_vertex[x - 1];
        let mut count = times.partition_point(|&s| s <= t) as u64;
        if x == 1 && t >= 0.0 {
            count -= 1;
        }
        Ok(count)
    }

    /// Entries into `x` up to the horizon.
    pub fn n_x(&self, x: VertexId) -> u64 {
        self.n_x_at(x, self.horizon).expect("horizon is always queryable")
    }

    /// Number of events at `tail(e)` with `t - time` in `[lo, hi)`.
    fn departures_between(&self, g: &MetricDigraph, e: EdgeId, t: f64, lo: f64, hi: f64) -> u64 {
        let times = &self.per_vertex[g.edge(e).tail - 1];
        let at_least_lo = times.partition_point(|&s| t - s >= lo);
        let at_least_hi = times.partition_point(|&s| t - s >= hi);
        (at_least_lo - at_least_hi) as u64
    }

    /// Points in flight at `t`: a point occupies its edge over
    /// `[departure, departure + length)`.
    pub fn n_total(&self, g: &MetricDigraph, t: f64) -> Result<u64, SimulationError> {
        self.check_query(t)?;
        Ok(g.edges().iter().map(|e| self.departures_between(g, e.id, t, 0.0, e.length.value())).sum())
    }

    /// Points at time `t` on the stretch `[r, r + tau)` of edge `e`, measured
    /// from its tail.
    pub fn segment_count(&self, g: &MetricDigraph, t: f64, e: EdgeId, r: f64, tau: f64) -> Result<u64, SimulationError> {
        self.check_query(t)?;
        let length = g.length(e);
        if !(r >= 0.0 && tau >= 0.0 && r + tau <= length) {
            return Err(SimulationError::SegmentOutOfBounds { edge: e, r, tau, length });
        }
        Ok(self.departures_between(g, e, t, r, r + tau))
    }

    /// Events whose time lies within [`NEAR_HORIZON`] of `t`.
    pub fn events_near(&self, t: f64) -> usize {
        self.per_vertex
            .iter()
            .map(|times| {
                let lo = times.partition_point(|&s| s < t - NEAR_HORIZON);
                let hi = times.partition_point(|&s| s <= t + NEAR_HORIZON);
                hi - lo
            })
            .sum()
    }

    /// Whether `(v, time)` was logged. Panics if vectors were not recorded.
    pub fn contains(&self, g: &MetricDigraph, v: VertexId, time: &TimeVector) -> bool {
        let trace = self.trace();
        let numeric = time.numeric(g);
        let m = trace.edge_count;
        let start = trace.times.partition_point(|&s| s < numeric);
        (start..self.len())
            .take_while(|&i| trace.times[i] == numeric)
            .any(|i| trace.vertices[i] == v && &trace.counts[i * m..(i + 1) * m] == time.counts())
    }
}

/// Free-function form of [`EventLog::n_total`].
pub fn n_total(g: &MetricDigraph, log: &EventLog, t: f64) -> Result<u64, SimulationError> {
    log.n_total(g, t)
}

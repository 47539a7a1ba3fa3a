//! Point propagation on directed Hamiltonian metric graphs.
//!
//! Points leave a start vertex along every edge at unit speed, branch at
//! every vertex, and merge when they arrive somewhere simultaneously. This
//! crate simulates that system exactly and counts it combinatorially:
//!
//! - [`graph`] loads and canonicalizes the graph.
//! - [`time`] represents times exactly as edge-traversal count vectors.
//! - [`cycles`] splits circulations into cycles and enumerates the reachable
//!   cycle tuples that classify entry times of the start vertex.
//! - [`sim`] runs the event simulation.
//! - [`asymptotics`] counts entries exactly from the tuples and computes the
//!   leading coefficients of `N₁(T)` and `N(T)`.
//! - [`cli`] is the command-line front end.
//!
//! ```
//! use cyclecount::{asymptotics, cycles, graph, sim};
//!
//! let g = graph::load_graph(r#"{"vertices": 2, "start": 1, "edges": [
//!     {"from": 1, "to": 2, "length": {"sqrt": 2}},
//!     {"from": 2, "to": 1, "length": {"sqrt": 3}},
//!     {"from": 2, "to": 1, "length": {"sqrt": 5}}]}"#).unwrap();
//!
//! let d = cycles::reachable_tuples(&g);
//! let log = sim::simulate(&g, 10.0).unwrap();
//! assert_eq!(log.n_x(1), asymptotics::n1_exact(&g, &d, 10.0));
//! ```

pub mod asymptotics;
pub mod cli;
pub mod convergence;
pub mod cycles;
pub mod graph;
pub mod sim;
pub mod time;

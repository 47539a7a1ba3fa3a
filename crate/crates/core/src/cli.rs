//! Command-line front end.
//!
//! Exit codes: `0` success, `1` check mismatch, `2` file or parse error,
//! `3` validation error, `4` event or β cap exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::asymptotics::{leading_coefficients, n1_exact};
use crate::convergence::{convergence_rows, format_sig, sample_horizons, write_csv, Spacing};
use crate::cycles::{enumerate_complete_tuples, enumerate_reachable_tuples, CycleTuple, ReachableTuples};
use crate::graph::{GraphDocument, GraphError, MetricDigraph};
use crate::sim::{simulate_with, EventLog, SimulationError, SimulationOptions, DEFAULT_EVENT_CAP};

pub const DEFAULT_BETA_CAP: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "cyclecount", version, about = "Point propagation on directed Hamiltonian metric graphs")]
pub struct Cli {
    /// Maximum number of simulated events.
    #[arg(long, global = true, env = "CYCLECOUNT_EVENT_CAP", default_value_t = DEFAULT_EVENT_CAP)]
    pub event_cap: usize,
    /// Maximum Betti number accepted by tuple enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BETA_CAP)]
    pub beta_cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct GraphArg {
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate a graph file.
    Validate(GraphArg),
    /// Simulate up to a horizon and print counts.
    Simulate {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long = "T", alias = "horizon")]
        horizon: f64,
        /// Also report entries into this vertex (canonical label).
        #[arg(long)]
        vertex: Option<usize>,
        /// Also report points on a segment: `edge,r,tau`.
        #[arg(long, value_parser = parse_segment)]
        segment: Option<(usize, f64, f64)>,
    },
    /// Enumerate the reachable tuple sets D_1..D_β.
    Enumerate(GraphArg),
    /// Print the leading asymptotic coefficients.
    Coefficient {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        json: bool,
    },
    /// Write a CSV of N(T)/T^(β-1) over a ladder of horizons.
    Convergence {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Linear instead of geometric spacing.
        #[arg(long)]
        linear: bool,
    },
    /// Compare simulated N₁(T) with the tuple formula.
    Check {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long = "T", alias = "horizon")]
        horizon: f64,
    },
}

fn parse_segment(s: &str) -> Result<(usize, f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [e, r, tau] = parts.as_slice() else {
        return Err("expected edge,r,tau".to_string());
    };
    Ok((
        e.parse().map_err(|err| format!("edge: {err}"))?,
        r.parse().map_err(|err| format!("r: {err}"))?,
        tau.parse().map_err(|err| format!("tau: {err}"))?,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Validate,
    Simulate,
    Enumerate,
    Coefficient,
    Convergence,
    Check,
}

/// Fully resolved invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub graph_path: PathBuf,
    pub horizon: Option<f64>,
    pub samples: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub event_cap: usize,
    pub beta_cap: usize,
    pub vertex: Option<usize>,
    pub segment: Option<(usize, f64, f64)>,
    pub spacing: Spacing,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let mut config = RunConfig {
            command: CommandKind::Validate,
            graph_path: PathBuf::new(),
            horizon: None,
            samples: None,
            output: None,
            format: cli.format,
            event_cap: cli.event_cap,
            beta_cap: cli.beta_cap,
            vertex: None,
            segment: None,
            spacing: Spacing::Geometric,
        };
        match cli.command {
            Command::Validate(g) => config.graph_path = g.graph,
            Command::Simulate { graph, horizon, vertex, segment } => {
                config.command = CommandKind::Simulate;
                config.graph_path = graph.graph;
                config.horizon = Some(horizon);
                config.vertex = vertex;
                config.segment = segment;
            }
            Command::Enumerate(g) => {
                config.command = CommandKind::Enumerate;
                config.graph_path = g.graph;
            }
            Command::Coefficient { graph, json } => {
                config.command = CommandKind::Coefficient;
                config.graph_path = graph.graph;
                if json {
                    config.format = Format::Json;
                }
            }
            Command::Convergence { graph, t_max, samples, out, linear } => {
                config.command = CommandKind::Convergence;
                config.graph_path = graph.graph;
                config.horizon = Some(t_max);
                config.samples = Some(samples);
                config.output = out;
                config.format = Format::Csv;
                if linear {
                    config.spacing = Spacing::Linear;
                }
            }
            Command::Check { graph, horizon } => {
                config.command = CommandKind::Check;
                config.graph_path = graph.graph;
                config.horizon = Some(horizon);
            }
        }
        config
    }
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let code = if matches!(e, GraphError::Parse(_)) { 2 } else { 3 };
        Failure::new(code, e.to_string())
    }
}

impl From<SimulationError> for Failure {
    fn from(e: SimulationError) -> Self {
        let code = if matches!(e, SimulationError::CapExceeded { .. } | SimulationError::Overflow(_)) { 4 } else { 3 };
        Failure::new(code, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::new(2, e.to_string())
    }
}

/// Runs one command, writing the document to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run<O: Write, E: Write>(config: &RunConfig, out: &mut O, err: &mut E) -> i32 {
    match dispatch(config, out, err) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch<O: Write, E: Write>(config: &RunConfig, out: &mut O, err: &mut E) -> Result<i32, Failure> {
    let text = fs::read_to_string(&config.graph_path)
        .map_err(|e| Failure::new(2, format!("{}: {e}", config.graph_path.display())))?;
    let doc = GraphDocument::from_json(&text)?;
    let g = MetricDigraph::from_document(&doc)?;
    for w in g.warnings() {
        writeln!(err, "warning: {w}")?;
    }
    match config.command {
        CommandKind::Validate => validate(config, &g, out),
        CommandKind::Simulate => simulate_cmd(config, &g, out, err),
        CommandKind::Enumerate => enumerate_cmd(config, &g, out),
        CommandKind::Coefficient => coefficient_cmd(config, &g, out),
        CommandKind::Convergence => convergence_cmd(config, &g, out, err),
        CommandKind::Check => check_cmd(config, &g, out, err),
    }
}

fn horizon(config: &RunConfig) -> Result<f64, Failure> {
    match config.horizon {
        Some(t) if t.is_finite() && t >= 0.0 => Ok(t),
        Some(t) => Err(Failure::new(3, format!("horizon must be non-negative, got {t}"))),
        None => Err(Failure::new(3, "missing horizon")),
    }
}

fn run_simulation<E: Write>(config: &RunConfig, g: &MetricDigraph, t: f64, err: &mut E) -> Result<EventLog, Failure> {
    let log = simulate_with(g, t, &SimulationOptions::counts_only(config.event_cap))?;
    let near = log.events_near(t);
    if near > 0 {
        writeln!(err, "warning: {near} event time(s) within 1e-9 of T = {t}; counts at T may be sensitive to rounding")?;
    }
    Ok(log)
}

fn reachable(config: &RunConfig, g: &MetricDigraph) -> Result<ReachableTuples, Failure> {
    if g.betti() > config.beta_cap {
        return Err(Failure::new(
            4,
            format!("β = {} exceeds the β cap {}; raise it with --beta-cap", g.betti(), config.beta_cap),
        ));
    }
    Ok(enumerate_reachable_tuples(g, &enumerate_complete_tuples(g)))
}

fn tuple_json(g: &MetricDigraph, tuple: &CycleTuple) -> serde_json::Value {
    tuple.cycles().iter().map(|c| json!({ "vertices": c.vertices(g), "edges": c.edges() })).collect()
}

/// `(1 2 3)[0 1 5]`: vertices then edge ids, since parallel edges make the
/// vertex sequence alone ambiguous.
fn tuple_text(g: &MetricDigraph, tuple: &CycleTuple) -> String {
    let join = |xs: &[usize]| xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    tuple
        .cycles()
        .iter()
        .map(|c| format!("({})[{}]", join(&c.vertices(g)), join(c.edges())))
        .collect::<Vec<_>>()
        .join(" ")
}

fn validate<O: Write>(config: &RunConfig, g: &MetricDigraph, out: &mut O) -> Result<i32, Failure> {
    if config.format == Format::Json {
        let order: Vec<_> = (1..=g.vertex_count()).map(|v| g.out_order(v).to_vec()).collect();
        let doc = json!({
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "beta": g.betti(),
            "hamiltonian_cycle": g.hamiltonian_cycle(),
            "inner_edges": (1..=g.vertex_count()).map(|v| g.inner_edge_of(v)).collect::<Vec<_>>(),
            "out_order": order,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        return Ok(0);
    }
    writeln!(out, "vertices: {}", g.vertex_count())?;
    writeln!(out, "edges: {}", g.edge_count())?;
    writeln!(out, "beta: {}", g.betti())?;
    let cycle: Vec<String> = g.hamiltonian_cycle().iter().map(ToString::to_string).collect();
    writeln!(out, "hamiltonian cycle (input labels): {}", cycle.join(" "))?;
    for v in 1..=g.vertex_count() {
        let order: Vec<String> = g
            .out_order(v)
            .iter()
            .map(|&e| {
                let edge = g.edge(e);
                let tag = if g.is_inner(e) { "inner" } else { "outer" };
                format!("e{e}:{}->{}[{tag}]", edge.tail, edge.head)
            })
            .collect();
        writeln!(out, "vertex {v}: {}", order.join(" "))?;
    }
    Ok(0)
}

fn simulate_cmd<O: Write, E: Write>(config: &RunConfig, g: &MetricDigraph, out: &mut O, err: &mut E) -> Result<i32, Failure> {
    let t = horizon(config)?;
    if let Some(x) = config.vertex {
        if x == 0 || x > g.vertex_count() {
            return Err(Failure::new(3, format!("vertex {x} is outside 1..={}", g.vertex_count())));
        }
    }
    if let Some((e, _, _)) = config.segment {
        if e >= g.edge_count() {
            return Err(Failure::new(3, format!("edge {e} does not exist")));
        }
    }
    let log = run_simulation(config, g, t, err)?;
    let n = log.n_total(g, t)?;
    let n1 = log.n_x(1);
    let nx = config.vertex.map(|x| (x, log.n_x(x)));
    let segment = match config.segment {
        Some((e, r, tau)) => Some((e, r, tau, log.segment_count(g, t, e, r, tau)?)),
        None => None,
    };
    if config.format == Format::Json {
        let mut doc = json!({ "T": t, "events": log.len(), "N": n, "N1": n1 });
        if let Some((x, c)) = nx {
            doc["vertex"] = json!({ "x": x, "count": c });
        }
        if let Some((e, r, tau, c)) = segment {
            doc["segment"] = json!({ "edge": e, "r": r, "tau": tau, "count": c });
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
    } else {
        writeln!(out, "T: {}", format_sig(t))?;
        writeln!(out, "events: {}", log.len())?;
        writeln!(out, "N: {n}")?;
        writeln!(out, "N1: {n1}")?;
        if let Some((x, c)) = nx {
            writeln!(out, "N_{x}: {c}")?;
        }
        if let Some((e, r, tau, c)) = segment {
            writeln!(out, "segment e{e} [{}, {}): {c}", format_sig(r), format_sig(r + tau))?;
        }
    }
    Ok(0)
}

fn enumerate_cmd<O: Write>(config: &RunConfig, g: &MetricDigraph, out: &mut O) -> Result<i32, Failure> {
    let d = reachable(config, g)?;
    if config.format == Format::Json {
        let sets: Vec<_> = d
            .iter()
            .map(|(k, set)| {
                json!({
                    "k": k,
                    "count": set.len(),
                    "tuples": set.iter().map(|t| tuple_json(g, t)).collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = json!({ "beta": g.betti(), "hamiltonian_cycle": g.hamiltonian_cycle(), "sets": sets });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        return Ok(0);
    }
    writeln!(out, "beta: {}", g.betti())?;
    for (k, set) in d.iter() {
        writeln!(out, "|D_{k}| = {}", set.len())?;
    }
    for (k, set) in d.iter() {
        writeln!(out, "D_{k}:")?;
        for tuple in set {
            writeln!(out, "  {}", tuple_text(g, tuple))?;
        }
    }
    Ok(0)
}

fn coefficient_cmd<O: Write>(config: &RunConfig, g: &MetricDigraph, out: &mut O) -> Result<i32, Failure> {
    let d = reachable(config, g)?;
    let report = leading_coefficients(g, d.d(g.betti()));
    if config.format == Format::Json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"))?;
        return Ok(0);
    }
    writeln!(out, "beta: {}", report.beta)?;
    writeln!(out, "tuples in D_beta: {}", report.tuple_count)?;
    writeln!(out, "total length: {}", format_sig(report.total_length))?;
    writeln!(out, "a1: {}", format_sig(report.a1))?;
    writeln!(out, "n_leading: {}", format_sig(report.n_leading))?;
    if let Some(single) = report.single_tuple {
        writeln!(out, "single-tuple formula: {}", format_sig(single))?;
    }
    Ok(0)
}

fn convergence_cmd<O: Write, E: Write>(config: &RunConfig, g: &MetricDigraph, out: &mut O, err: &mut E) -> Result<i32, Failure> {
    let t_max = horizon(config)?;
    let samples = config.samples.unwrap_or(100);
    if samples < 2 || t_max <= 0.0 {
        return Err(Failure::new(3, "convergence needs --samples >= 2 and --t-max > 0"));
    }
    let log = run_simulation(config, g, t_max, err)?;
    let rows = convergence_rows(g, &log, &sample_horizons(t_max, samples, config.spacing))?;
    match &config.output {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))?;
            write_csv(&rows, io::BufWriter::new(file))?;
        }
        None => write_csv(&rows, &mut *out)?,
    }
    Ok(0)
}

fn check_cmd<O: Write, E: Write>(config: &RunConfig, g: &MetricDigraph, out: &mut O, err: &mut E) -> Result<i32, Failure> {
    let t = horizon(config)?;
    let d = reachable(config, g)?;
    let log = run_simulation(config, g, t, err)?;
    let simulated = log.n_x(1);
    let formula = n1_exact(g, &d, t);
    if simulated == formula {
        writeln!(out, "N1={simulated} (both paths)")?;
        Ok(0)
    } else {
        writeln!(out, "N1 mismatch: simulator={simulated} formula={formula}")?;
        Ok(1)
    }
}

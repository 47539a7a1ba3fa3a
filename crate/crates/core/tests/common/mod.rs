#![allow(dead_code)]

use cyclecount::graph::{load_graph, EdgeSpec, GraphDocument, LengthSpec, MetricDigraph};
use rand::seq::SliceRandom;
use rand::Rng;

pub const PRIMES: [u64; 30] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107,
    109, 113,
];

pub fn shipped(name: &str) -> MetricDigraph {
    let path = format!("{}/graphs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    load_graph(&std::fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn shipped_graphs() -> Vec<(&'static str, MetricDigraph)> {
    ["four_vertex", "two_vertex", "triangle", "one_tuple"].into_iter().map(|n| (n, shipped(n))).collect()
}

/// A Hamiltonian graph on `n` vertices with `m >= n` edges and shuffled labels.
/// The Hamiltonian cycle is not declared. Lengths are square roots of distinct
/// primes.
pub fn random_hamiltonian<R: Rng>(rng: &mut R, n: usize, m: usize) -> GraphDocument {
    assert!(n >= 1 && m >= n && m <= PRIMES.len());
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (labels[i], labels[(i + 1) % n])).collect();
    while pairs.len() < m {
        pairs.push((rng.gen_range(1..=n), rng.gen_range(1..=n)));
    }
    pairs.shuffle(rng);
    let mut primes = PRIMES.to_vec();
    primes.shuffle(rng);
    GraphDocument {
        vertices: n,
        start: rng.gen_range(1..=n),
        edges: pairs
            .into_iter()
            .zip(primes)
            .map(|((from, to), p)| EdgeSpec { from, to, length: LengthSpec::Sqrt(p) })
            .collect(),
        hamiltonian_cycle: None,
    }
}

/// A directed `n`-cycle with shuffled labels.
pub fn random_cycle<R: Rng>(rng: &mut R, n: usize) -> GraphDocument {
    random_hamiltonian(rng, n, n)
}

//! Exact times as edge-traversal count vectors.
//!
//! With rationally independent edge lengths, two non-negative integer
//! combinations of lengths are equal exactly when their coefficient vectors
//! are equal, so a [`TimeVector`] is a faithful exact representation of a
//! time. Floating point only enters through [`TimeVector::numeric`], which is
//! used for ordering against a horizon and never for equality.

use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeId, MetricDigraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("edge traversal count overflow on edge {edge}")]
pub struct CountOverflow {
    pub edge: EdgeId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeVector {
    counts: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeComparison {
    Equal,
    Different,
}

impl TimeVector {
    pub fn zero(edges: usize) -> Self {
        Self { counts: vec![0; edges] }
    }

    pub fn unit(edges: usize, e: EdgeId) -> Self {
        let mut v = Self::zero(edges);
        v.counts[e] = 1;
        v
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Componentwise sum; both vectors must index the same edge set.
    pub fn add(&self, other: &Self) -> Result<Self, CountOverflow> {
        assert_eq!(self.len(), other.len(), "time vectors over different edge sets");
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .enumerate()
            .map(|(edge, (a, b))| a.checked_add(*b).ok_or(CountOverflow { edge }))
            .collect::<Result<_, _>>()?;
        Ok(Self { counts })
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, other: &Self, k: u32) -> Result<Self, CountOverflow> {
        assert_eq!(self.len(), other.len(), "time vectors over different edge sets");
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .enumerate()
            .map(|(edge, (a, b))| {
                b.checked_mul(k)
                    .and_then(|bk| a.checked_add(bk))
                    .ok_or(CountOverflow { edge })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { counts })
    }

    /// Adds one traversal of edge `e` in place.
    pub fn push_edge(&mut self, e: EdgeId) -> Result<(), CountOverflow> {
        self.counts[e] = self.counts[e].checked_add(1).ok_or(CountOverflow { edge: e })?;
        Ok(())
    }

    /// Floating-point value of the time, summed in edge-id order so equal
    /// vectors always evaluate to bit-identical values.
    pub fn numeric(&self, g: &MetricDigraph) -> f64 {
        numeric_counts(&self.counts, g)
    }

    pub fn compare_exact(&self, other: &Self) -> TimeComparison {
        if self == other {
            TimeComparison::Equal
        } else {
            TimeComparison::Different
        }
    }
}

pub(crate) fn numeric_counts(counts: &[u32], g: &MetricDigraph) -> f64 {
    counts
        .iter()
        .zip(g.edges())
        .map(|(&c, e)| f64::from(c) * e.length.value())
        .sum()
}

impl fmt::Display for TimeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_graph;
    use proptest::prelude::*;

    const FOUR_VERTEX: &str = include_str!("../graphs/four_vertex.json");

    #[test]
    fn zero_is_identity() {
        let v = TimeVector::from_counts(vec![3, 0, 2]);
        assert_eq!(TimeVector::zero(3).add(&v).unwrap(), v);
        let u = TimeVector::unit(3, 0);
        assert_eq!(u.add(&u).unwrap().counts(), &[2, 0, 0]);
    }

    #[test]
    fn overflow_is_an_error() {
        let big = TimeVector::from_counts(vec![u32::MAX, 0]);
        assert_eq!(big.add(&TimeVector::unit(2, 0)), Err(CountOverflow { edge: 0 }));
        let mut v = big.clone();
        assert!(v.push_edge(0).is_err());
        assert!(v.push_edge(1).is_ok());
    }

    #[test]
    fn walk_through_two_vertex_graph() {
        // e0: 1->2, e1: 2->1 inner, e2: 2->1 outer
        let mut v = TimeVector::zero(3);
        for e in [0, 2, 0, 1] {
            v.push_edge(e).unwrap();
        }
        assert_eq!(v.counts(), &[2, 1, 1]);
    }

    #[test]
    fn numeric_values_on_four_vertex() {
        let g = load_graph(FOUR_VERTEX).unwrap();
        assert_eq!(TimeVector::zero(8).numeric(&g), 0.0);
        // edge 0 is 1->2 with length sqrt(3)
        assert!((TimeVector::unit(8, 0).numeric(&g) - 3f64.sqrt()).abs() < 1e-15);
        let mut v = TimeVector::zero(8);
        v.push_edge(0).unwrap();
        v.push_edge(2).unwrap();
        assert!((v.numeric(&g) - 5.048_675_597_924_277).abs() < 1e-12);
    }

    #[test]
    fn exact_comparison() {
        let a = TimeVector::from_counts(vec![1, 0, 1]);
        let b = TimeVector::from_counts(vec![1, 1, 0]);
        assert_eq!(a.compare_exact(&a.clone()), TimeComparison::Equal);
        assert_eq!(a.compare_exact(&b), TimeComparison::Different);
    }

    proptest! {
        #[test]
        fn add_is_commutative_and_associative(
            a in proptest::collection::vec(0u32..1000, 8),
            b in proptest::collection::vec(0u32..1000, 8),
            c in proptest::collection::vec(0u32..1000, 8),
        ) {
            let (a, b, c) = (TimeVector::from_counts(a), TimeVector::from_counts(b), TimeVector::from_counts(c));
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        }

        #[test]
        fn distinct_vectors_have_distinct_times(
            a in proptest::collection::vec(0u32..60, 8),
            b in proptest::collection::vec(0u32..60, 8),
        ) {
            let g = load_graph(FOUR_VERTEX).unwrap();
            let (a, b) = (TimeVector::from_counts(a), TimeVector::from_counts(b));
            prop_assume!(a != b);
            prop_assert!((a.numeric(&g) - b.numeric(&g)).abs() > 1e-9);
        }
    }
}

//! Exact entry counts at vertex 1 and the leading asymptotic coefficients.
//!
//! Every entry time of vertex 1 splits uniquely as `Σ n_j t(d_j)` with
//! `n_j >= 1` over a reachable tuple `d`, so the number of entries up to `T`
//! is a sum of lattice-point counts, one per reachable tuple. Only the
//! length-`β` tuples contribute to the leading term:
//!
//! ```text
//! N₁(T) ~ a₁ T^β,              a₁ = Σ_{d ∈ D_β} 1 / (β! Π t(d_i))
//! N(T)  ~ (Σ_e t(e)) β a₁ T^(β-1)
//! ```

use serde::Serialize;

use crate::cycles::{CycleTuple, ReachableTuples};
use crate::graph::MetricDigraph;

/// Number of integer tuples `n_j >= 1` with `Σ n_j · times[j] <= t`.
///
/// The empty tuple counts once for any `t >= 0`.
pub fn count_lattice(times: &[f64], t: f64) -> u64 {
    assert!(times.iter().all(|&x| x > 0.0), "lattice step lengths must be positive");
    fn rec(times: &[f64], partial: f64, t: f64) -> u64 {
        let (&step, rest) = match times.split_first() {
            None => return u64::from(partial <= t),
            Some(split) => split,
        };
        if rest.is_empty() {
            // largest n >= 0 with partial + n * step <= t
            if partial + step > t {
                return 0;
            }
            let mut n = ((t - partial) / step).floor() as u64;
            while n > 0 && partial + n as f64 * step > t {
                n -= 1;
            }
            while partial + (n + 1) as f64 * step <= t {
                n += 1;
            }
            return n;
        }
        let floor: f64 = rest.iter().sum();
        let mut total = 0;
        let mut n = 1u64;
        loop {
            let s = partial + n as f64 * step;
            if s + floor > t {
                break;
            }
            total += rec(rest, s, t);
            n += 1;
        }
        total
    }
    if t < 0.0 {
        return 0;
    }
    rec(times, 0.0, t)
}

/// `N₁(T)` as a sum of lattice counts over every reachable tuple.
pub fn n1_exact(g: &MetricDigraph, d: &ReachableTuples, t: f64) -> u64 {
    d.iter()
        .flat_map(|(_, set)| set.iter())
        .map(|tuple| count_lattice(&tuple.cycle_times(g), t))
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct TupleTerm {
    /// Position of the tuple in sorted `D_β`.
    pub tuple: usize,
    /// `1 / (β! Π t(d_i))`.
    pub term: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    pub beta: usize,
    /// Coefficient of `T^β` in `N₁(T)`.
    pub a1: f64,
    /// Coefficient of `T^(β-1)` in `N(T)`.
    pub n_leading: f64,
    pub tuple_count: usize,
    pub total_length: f64,
    pub per_tuple_terms: Vec<TupleTerm>,
    /// Set when `D_β` has exactly one tuple: the same coefficient from the
    /// single-tuple closed form.
    pub single_tuple: Option<f64>,
}

/// Leading coefficients of `N₁` and `N` from `D_β`.
pub fn leading_coefficients<'a, I>(g: &MetricDigraph, d_beta: I) -> AsymptoticReport
where
    I: IntoIterator<Item = &'a CycleTuple>,
{
    let beta = g.betti();
    let beta_factorial = factorial(beta);
    let total_length = g.total_length();
    let times: Vec<Vec<f64>> = d_beta
        .into_iter()
        .map(|d| {
            assert_eq!(d.len(), beta, "D_β tuples have length β");
            d.cycle_times(g)
        })
        .collect();
    let per_tuple_terms: Vec<TupleTerm> = times
        .iter()
        .enumerate()
        .map(|(tuple, ts)| TupleTerm { tuple, term: 1.0 / (beta_factorial * ts.iter().product::<f64>()) })
        .collect();
    let a1 = compensated_sum(per_tuple_terms.iter().map(|t| t.term));
    let single_tuple = match times.as_slice() {
        [only] => Some(sperner_coefficient(only, total_length)),
        _ => None,
    };
    AsymptoticReport {
        beta,
        a1,
        n_leading: total_length * a1 * beta as f64,
        tuple_count: per_tuple_terms.len(),
        total_length,
        per_tuple_terms,
        single_tuple,
    }
}

/// `total_length / ((β - 1)! Π cycle_times)` for a single tuple of `β`
/// cycles.
pub fn sperner_coefficient(cycle_times: &[f64], total_length: f64) -> f64 {
    assert!(!cycle_times.is_empty());
    let product: f64 = cycle_times.iter().product();
    total_length / (factorial(cycle_times.len() - 1) * product)
}

/// `Σ_{d ∈ D_β} 1 / Π t(d_i)`, the ordering-invariant part of `a₁`.
pub fn inverse_product_sum<'a, I>(g: &MetricDigraph, d_beta: I) -> f64
where
    I: IntoIterator<Item = &'a CycleTuple>,
{
    compensated_sum(d_beta.into_iter().map(|d| 1.0 / d.cycle_times(g).iter().product::<f64>()))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Neumaier summation.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::reachable_tuples;
    use crate::graph::load_graph;
    use proptest::prelude::*;

    /// Independent oracle: scan a box of candidate tuples.
    fn grid_scan(times: &[f64], t: f64) -> u64 {
        let bounds: Vec<u64> = times.iter().map(|&x| (t / x).floor() as u64 + 1).collect();
        let mut count = 0;
        let mut idx = vec![1u64; times.len()];
        if times.is_empty() {
            return 1;
        }
        loop {
            let s: f64 = idx.iter().zip(times).map(|(&n, &x)| n as f64 * x).sum();
            if s <= t {
                count += 1;
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return count;
                }
                idx[k] += 1;
                if idx[k] <= bounds[k] {
                    break;
                }
                idx[k] = 1;
                k += 1;
            }
        }
    }

    #[test]
    fn lattice_examples() {
        assert_eq!(count_lattice(&[2.0], 7.0), 3);
        let (s2, s3, s5) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
        assert_eq!(count_lattice(&[s2 + s5, s2 + s3], 10.0), 2);
        assert_eq!(count_lattice(&[1.5, 2.5], 1.0), 0);
        assert_eq!(count_lattice(&[], 1.0), 1);
        assert_eq!(count_lattice(&[1.0], -1.0), 0);
    }

    #[test]
    fn n1_for_cycle_and_two_vertex_graphs() {
        let g = load_graph(include_str!("../graphs/triangle.json")).unwrap();
        let d = reachable_tuples(&g);
        let l = g.total_length();
        for t in [0.5, 5.0, 12.3, 40.0] {
            assert_eq!(n1_exact(&g, &d, t), (t / l).floor() as u64);
        }
        let g = load_graph(include_str!("../graphs/two_vertex.json")).unwrap();
        let d = reachable_tuples(&g);
        assert_eq!(n1_exact(&g, &d, 10.0), 7);
    }

    #[test]
    fn coefficients_for_small_graphs() {
        let g = load_graph(include_str!("../graphs/triangle.json")).unwrap();
        let d = reachable_tuples(&g);
        let r = leading_coefficients(&g, d.d(1));
        assert!((r.n_leading - 1.0).abs() < 1e-15);

        let g = load_graph(include_str!("../graphs/two_vertex.json")).unwrap();
        let d = reachable_tuples(&g);
        let r = leading_coefficients(&g, d.d(2));
        let (s2, s3, s5) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt());
        let a1 = 1.0 / (2.0 * (s2 + s5) * (s2 + s3));
        assert!((r.a1 - a1).abs() < 1e-15);
        assert!((r.n_leading - (s2 + s3 + s5) * a1 * 2.0).abs() < 1e-14);
        let sperner = sperner_coefficient(&[s2 + s5, s2 + s3], s2 + s3 + s5);
        assert!((r.n_leading - sperner).abs() < 1e-14);
        assert!((r.single_tuple.unwrap() - sperner).abs() < 1e-14);
    }

    #[test]
    fn sperner_single_cycle() {
        assert_eq!(sperner_coefficient(&[4.5], 4.5), 1.0);
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let xs = [1e16, 1.0, -1e16];
        assert_eq!(compensated_sum(xs), 1.0);
    }

    proptest! {
        #[test]
        fn lattice_matches_grid_scan(
            times in proptest::collection::vec(0.7f64..4.0, 1..4),
            t in 0.0f64..14.0,
        ) {
            prop_assert_eq!(count_lattice(&times, t), grid_scan(&times, t));
        }

        #[test]
        fn lattice_is_monotone(times in proptest::collection::vec(0.5f64..3.0, 1..4), t in 0.0f64..10.0, dt in 0.0f64..3.0) {
            prop_assert!(count_lattice(&times, t) <= count_lattice(&times, t + dt));
        }
    }
}

//! Sweeps of `N(T) / T^(β-1)` over many horizons from a single event log.

use std::io::{self, Write};

use crate::graph::MetricDigraph;
use crate::sim::{EventLog, SimulationError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Spacing {
    #[default]
    Geometric,
    Linear,
}

/// `samples` horizons from `t_max / samples` up to `t_max`, strictly
/// increasing, the last one exactly `t_max`.
pub fn sample_horizons(t_max: f64, samples: usize, spacing: Spacing) -> Vec<f64> {
    assert!(samples >= 2, "need at least two samples");
    assert!(t_max > 0.0);
    let t_min = t_max / samples as f64;
    let last = (samples - 1) as f64;
    (0..samples)
        .map(|i| {
            if i + 1 == samples {
                return t_max;
            }
            let s = i as f64 / last;
            match spacing {
                Spacing::Geometric => t_min * (t_max / t_min).powf(s),
                Spacing::Linear => t_min + (t_max - t_min) * s,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub t: f64,
    pub n: u64,
    pub n1: u64,
    /// `N(T) / T^(β-1)`.
    pub ratio: f64,
}

pub fn convergence_rows(g: &MetricDigraph, log: &EventLog, horizons: &[f64]) -> Result<Vec<ConvergenceRow>, SimulationError> {
    let power = (g.betti() - 1) as i32;
    horizons
        .iter()
        .map(|&t| {
            let n = log.n_total(g, t)?;
            Ok(ConvergenceRow { t, n, n1: log.n_x_at(1, t)?, ratio: n as f64 / t.powi(power) })
        })
        .collect()
}

/// CSV with header `T,N,N1,ratio`; reals at 12 significant digits.
pub fn write_csv<W: Write>(rows: &[ConvergenceRow], mut out: W) -> io::Result<()> {
    writeln!(out, "T,N,N1,ratio")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", format_sig(r.t), r.n, r.n1, format_sig(r.ratio))?;
    }
    Ok(())
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 ..= 1e12`.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..DIGITS).contains(&exp) {
        let s = format!("{:.*e}", (DIGITS - 1) as usize, x);
        let (mantissa, e) = s.split_once('e').expect("scientific format has an exponent");
        let e: i32 = e.parse().expect("integer exponent");
        let sign = if e < 0 { '-' } else { '+' };
        return format!("{}e{}{:02}", trim_zeros(mantissa), sign, e.abs());
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_like_percent_g() {
        assert_eq!(format_sig(0.000064826299), "6.4826299e-05");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(150.0), "150");
        assert_eq!(format_sig(2f64.sqrt()), "1.41421356237");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.5e13), "1.5e+13");
    }

    #[test]
    fn horizons_are_increasing_and_end_at_t_max() {
        for spacing in [Spacing::Geometric, Spacing::Linear] {
            let ts = sample_horizons(200.0, 100, spacing);
            assert_eq!(ts.len(), 100);
            assert!((ts[0] - 2.0).abs() < 1e-12);
            assert_eq!(*ts.last().unwrap(), 200.0);
            assert!(ts.windows(2).all(|w| w[0] < w[1]));
        }
        let ts = sample_horizons(8.0, 4, Spacing::Geometric);
        assert!((ts[1] - 4.0f64.powf(1.0 / 3.0) * 2.0).abs() < 1e-12);
    }
}

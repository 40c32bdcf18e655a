use serde::{Deserialize, Serialize};

use super::ContactMatrix;

/// Node-level summary of a contact matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    #[serde(rename = "n")]
    pub num_locations: usize,
    #[serde(rename = "e")]
    pub num_edges: usize,
    pub mean_degree: f64,
    #[serde(skip)]
    pub degrees: Vec<f64>,
    pub degree_histogram: Vec<DegreeBin>,
}

/// Logarithmic degree bin `[left, right)`. Degrees below one share the
/// bin `[0, 1)`; the rest fall into power-of-two bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

/// Degree `k_i = (Σ_k m_ik + m_ki) − m_ii` and edge counts.
///
/// Edges are the nonzero off-diagonal entries; self-flows contribute to the
/// degree but not to the edge count.
pub fn network_stats(matrix: &ContactMatrix) -> NetworkStats {
    let n = matrix.len();
    let inflow = matrix.inflows();
    let outflow = matrix.outflows();
    let degrees: Vec<f64> = (0..n)
        .map(|i| {
            let m_ii = matrix.self_flows()[i];
            (inflow[i] + m_ii) + (outflow[i] + m_ii) - m_ii
        })
        .collect();
    let num_edges = matrix.entries().filter(|&(_, _, m)| m > 0.0).count();
    let mean_degree = if n == 0 { 0.0 } else { degrees.iter().sum::<f64>() / n as f64 };
    NetworkStats {
        num_locations: n,
        num_edges,
        mean_degree,
        degree_histogram: log_histogram(&degrees),
        degrees,
    }
}

fn log_histogram(values: &[f64]) -> Vec<DegreeBin> {
    let mut bins: Vec<DegreeBin> = Vec::new();
    let below_one = values.iter().filter(|&&v| v < 1.0).count();
    if below_one > 0 {
        bins.push(DegreeBin { left: 0.0, right: 1.0, count: below_one });
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    if max < 1.0 {
        return bins;
    }
    for b in 0..=max.log2().floor() as i32 {
        let (left, right) = (2f64.powi(b), 2f64.powi(b + 1));
        let count = values.iter().filter(|&&v| v >= left && v < right).count();
        bins.push(DegreeBin { left, right, count });
    }
    bins
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::{ContactMatrix, EdgeDistances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left_km: f64,
    pub bin_right_km: f64,
    pub mass: f64,
}

/// Trip-count weighted distance distribution of inter-location trips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceHistogram {
    pub bin_km: f64,
    /// Nonempty bins only, ascending.
    pub bins: Vec<HistogramBin>,
    /// Smallest distance covering 95% of trips; `None` without trips.
    pub p95_km: Option<f64>,
    pub total_trips: f64,
}

pub fn distance_histogram(matrix: &ContactMatrix, distances: &EdgeDistances, bin_km: f64) -> Result<DistanceHistogram> {
    if !(bin_km > 0.0 && bin_km.is_finite()) {
        return Err(Error::invalid(format!("bin width {bin_km} must be positive")));
    }
    distances.check(matrix)?;
    let mut weighted: Vec<(f64, f64)> = matrix
        .entries()
        .zip(distances.as_slice())
        .filter(|((_, _, m), _)| *m > 0.0)
        .map(|((_, _, m), &d)| (d, m))
        .collect();
    let total: f64 = weighted.iter().map(|&(_, w)| w).sum();

    let mut counts: BTreeMap<u64, f64> = BTreeMap::new();
    for &(d, w) in &weighted {
        *counts.entry((d / bin_km).floor() as u64).or_default() += w;
    }
    let bins = counts
        .into_iter()
        .map(|(b, w)| HistogramBin {
            bin_left_km: b as f64 * bin_km,
            bin_right_km: (b + 1) as f64 * bin_km,
            mass: w / total,
        })
        .collect();

    weighted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut p95_km = None;
    let mut cumulative = 0.0;
    for &(d, w) in &weighted {
        cumulative += w;
        if cumulative >= 0.95 * total * (1.0 - 1e-12) {
            p95_km = Some(d);
            break;
        }
    }

    Ok(DistanceHistogram {
        bin_km,
        bins,
        p95_km,
        total_trips: total,
    })
}

impl DistanceHistogram {
    /// CSV with header `bin_left_km,bin_right_km,mass`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bin_left_km", "bin_right_km", "mass"])?;
        for bin in &self.bins {
            w.serialize((bin.bin_left_km, bin.bin_right_km, bin.mass))?;
        }
        w.flush().map_err(|e| Error::io("<histogram>", e))?;
        Ok(())
    }
}

use serde::{Deserialize, Serialize};

use super::GammaTripModel;
use crate::error::{Error, Result};
use crate::mobility::{ContactMatrix, EdgeDistances};

/// Absolute tolerance on the expected labeled fraction.
pub const LAMBDA_TOLERANCE: f64 = 1e-6;
pub const LAMBDA_MAX_ITERATIONS: usize = 100;

/// A group of `count` trips of the same length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripMass {
    pub count: f64,
    pub distance_km: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaFit {
    pub lambda: f64,
    /// `Σ c·min(1, λF(d)) / Σ c` at the returned λ.
    pub expected_fraction: f64,
    pub iterations: usize,
    /// Share of trip mass whose labeling probability is capped at one.
    pub capped_fraction: f64,
}

/// Inter-location trip masses of a matrix, one per stored entry.
///
/// Self-flows are left out: they have distance zero and stand for staying
/// within a location rather than travelling.
pub fn trip_masses(matrix: &ContactMatrix, distances: &EdgeDistances) -> Result<Vec<TripMass>> {
    distances.check(matrix)?;
    Ok(matrix
        .entries()
        .zip(distances.as_slice())
        .filter(|((_, _, m), _)| *m > 0.0)
        .map(|((_, _, m), &d)| TripMass { count: m, distance_km: d })
        .collect())
}

fn labeled_fraction(lambda: f64, densities: &[f64], trips: &[TripMass], total: f64) -> f64 {
    densities
        .iter()
        .zip(trips)
        .map(|(&f, t)| t.count * (lambda * f).min(1.0))
        .sum::<f64>()
        / total
}

/// Scaling factor λ such that the expected share of labeled trips is `μ`.
///
/// Starts from `λ = μ / E[F(d)]`. Whenever some `λ·F(d)` exceeds one, those
/// trips are capped at probability one and λ is re-solved over the remaining
/// trips. λ increases monotonically and the capped set only grows, so the
/// loop settles on the exact solution once no new trip gets capped.
pub fn compute_lambda(model: &GammaTripModel, trips: &[TripMass]) -> Result<LambdaFit> {
    let total: f64 = trips.iter().map(|t| t.count).sum();
    if trips.is_empty() || total <= 0.0 {
        return Err(Error::invalid("lambda needs a nonempty set of trips"));
    }
    let mu = model.mu;
    let densities: Vec<f64> = trips.iter().map(|t| model.density(t.distance_km)).collect();
    let achievable = densities
        .iter()
        .zip(trips)
        .filter(|(&f, _)| f > 0.0)
        .map(|(_, t)| t.count)
        .sum::<f64>()
        / total;
    if achievable < mu {
        return Err(Error::InfeasibleModeShare { target: mu, achievable });
    }

    let mean_density = densities.iter().zip(trips).map(|(&f, t)| t.count * f).sum::<f64>() / total;
    let mut lambda = mu / mean_density;
    let mut fraction = labeled_fraction(lambda, &densities, trips, total);
    let mut iterations = 1;
    while (fraction - mu).abs() > LAMBDA_TOLERANCE {
        if iterations >= LAMBDA_MAX_ITERATIONS {
            return Err(Error::LambdaNotConverged { target: mu, achieved: fraction });
        }
        let (mut capped_mass, mut free_density) = (0.0, 0.0);
        for (&f, t) in densities.iter().zip(trips) {
            if lambda * f >= 1.0 {
                capped_mass += t.count;
            } else {
                free_density += t.count * f;
            }
        }
        if free_density <= 0.0 {
            // every positive-density trip is already certain
            break;
        }
        lambda = (mu * total - capped_mass) / free_density;
        fraction = labeled_fraction(lambda, &densities, trips, total);
        iterations += 1;
    }

    let capped_fraction = densities
        .iter()
        .zip(trips)
        .filter(|(&f, _)| lambda * f >= 1.0)
        .map(|(_, t)| t.count)
        .sum::<f64>()
        / total;
    Ok(LambdaFit {
        lambda,
        expected_fraction: fraction,
        iterations,
        capped_fraction,
    })
}

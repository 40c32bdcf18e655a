//! Public-transit subsampling of a contact matrix.
//!
//! A trip of length `d` is labeled as transit with probability
//! `min(1, λ·F(d))`, where `F` is a gamma density and `λ` is calibrated so
//! that the expected labeled fraction equals the target mode share `μ`.

mod gamma;
mod histogram;
mod lambda;
mod sample;

pub use gamma::gamma_pdf;
pub use histogram::{distance_histogram, DistanceHistogram, HistogramBin};
pub use lambda::{compute_lambda, trip_masses, LambdaFit, TripMass, LAMBDA_MAX_ITERATIONS, LAMBDA_TOLERANCE};
pub use sample::sample_transit_matrix;

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default public-transit mode share.
pub const DEFAULT_MODE_SHARE: f64 = 0.35;

/// Target range for the mean transit trip distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaBand {
    Low,
    Mediate,
    High,
    Custom { min_km: f64, max_km: f64 },
}

impl DeltaBand {
    /// Closed range `[min_km, max_km]`.
    pub fn range_km(&self) -> (f64, f64) {
        match *self {
            DeltaBand::Low => (10.0, 20.0),
            DeltaBand::Mediate => (30.0, 40.0),
            DeltaBand::High => (50.0, 60.0),
            DeltaBand::Custom { min_km, max_km } => (min_km, max_km),
        }
    }

    pub fn contains(&self, km: f64) -> bool {
        let (lo, hi) = self.range_km();
        (lo..=hi).contains(&km)
    }

    pub fn label(&self) -> String {
        match *self {
            DeltaBand::Low => "low".into(),
            DeltaBand::Mediate => "mediate".into(),
            DeltaBand::High => "high".into(),
            DeltaBand::Custom { min_km, max_km } => format!("{min_km}-{max_km}km"),
        }
    }
}

/// Integer shape/scale pair of the distance density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamPair {
    pub k: u32,
    pub theta: u32,
}

impl ParamPair {
    pub fn mean_km(&self) -> f64 {
        f64::from(self.k) * f64::from(self.theta)
    }
}

pub const DEFAULT_K_RANGE: RangeInclusive<u32> = 2..=50;
pub const DEFAULT_THETA_RANGE: RangeInclusive<u32> = 1..=50;

/// Every integer `(k, θ)` whose mean `k·θ` lies in the band's closed range,
/// ordered by `k` then `θ`. An empty result is legal.
pub fn enumerate_param_pairs(
    band: DeltaBand,
    k_range: RangeInclusive<u32>,
    theta_range: RangeInclusive<u32>,
) -> Vec<ParamPair> {
    let mut pairs = Vec::new();
    for k in k_range {
        for theta in theta_range.clone() {
            let pair = ParamPair { k, theta };
            if band.contains(pair.mean_km()) {
                pairs.push(pair);
            }
        }
    }
    if pairs.is_empty() {
        log::warn!("no (k, theta) pair has a mean inside the {} band", band.label());
    }
    pairs
}

/// Gamma distance model with its calibrated scaling factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTripModel {
    pub k: f64,
    pub theta: f64,
    pub mu: f64,
    /// Set by [`GammaTripModel::calibrate`].
    pub lambda: Option<f64>,
}

impl GammaTripModel {
    pub fn new(k: f64, theta: f64, mu: f64) -> Result<Self> {
        if !(k >= 1.0 && k.is_finite()) {
            return Err(Error::invalid(format!("shape k = {k} must be at least 1")));
        }
        if !(theta >= 1.0 && theta.is_finite()) {
            return Err(Error::invalid(format!("scale theta = {theta} must be at least 1 km")));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::invalid(format!("mode share mu = {mu} must lie in (0, 1)")));
        }
        Ok(Self { k, theta, mu, lambda: None })
    }

    pub fn from_pair(pair: ParamPair, mu: f64) -> Result<Self> {
        Self::new(f64::from(pair.k), f64::from(pair.theta), mu)
    }

    pub fn mean_km(&self) -> f64 {
        self.k * self.theta
    }

    pub fn density(&self, km: f64) -> f64 {
        gamma_pdf(km, self.k, self.theta).unwrap_or(0.0)
    }

    /// `min(1, λ·F(d))`; zero when λ is not calibrated yet.
    pub fn labeling_probability(&self, km: f64) -> f64 {
        match self.lambda {
            Some(lambda) => (lambda * self.density(km)).min(1.0),
            None => 0.0,
        }
    }

    /// Solves λ on the given trip masses and stores it.
    pub fn calibrate(&mut self, trips: &[TripMass]) -> Result<LambdaFit> {
        let fit = compute_lambda(self, trips)?;
        self.lambda = Some(fit.lambda);
        Ok(fit)
    }
}

//! Metapopulation SIR simulation driven by origin-destination contact
//! matrices, with tools to compare epidemics seen through a full mobility
//! matrix against a sampled public-transit matrix.
//!
//! - [`mobility`]: trip ingestion, contact matrices, network statistics.
//! - [`transit`]: gamma trip-length model, mode-share calibration, sampling.
//! - [`engine`]: the daily hazard, introductions, and SIR dynamics.
//! - [`metrics`]: comparison statistics between two prevalence curves.
//! - [`theory`]: closed-form invasion probabilities.
//! - [`runner`]: configuration, synthetic cities, sweeps, and export.

mod error;

pub mod engine;
pub mod metrics;
pub mod mobility;
pub mod runner;
pub mod theory;
pub mod transit;

pub use error::{Error, ErrorKind, Result};
pub use engine::{EpidemicParams, HazardVariant, PrevalenceSeries, SeedRule};
pub use metrics::{compare, CompareConfig, ComparisonReport};
pub use mobility::{ContactMatrix, EdgeDistances, Location, LocationTable, NetworkStats, TripRecord};
pub use runner::{ScenarioConfig, SweepResult};
pub use theory::InvasionVariant;
pub use transit::{DeltaBand, GammaTripModel, ParamPair};

//! Scenario configuration, the parameter sweep, and result export.

mod city;
mod config;
mod export;
mod seeds;
mod stats;
mod sweep;

pub use city::{generate_synthetic_city, SyntheticCity, SyntheticCitySpec};
pub use config::{Disease, ScenarioConfig, TripInput};
pub use export::{export_results, read_sweep_result};
pub use seeds::{derive_seed, short_hash};
pub use stats::{bootstrap_ci, mean, mean_sd, StatSummary};
pub use sweep::{
    build_transit_cells, replay, replay_on, run_sweep, run_sweep_on, CellSummary, LedgerEntry, SampleCurve, Scenario,
    SkippedCell, SweepResult, TransitCell, TransitHistogram,
};

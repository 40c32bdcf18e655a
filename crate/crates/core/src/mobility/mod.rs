//! Trip ingestion, contact matrices, and network summaries.
//!
//! Locations are addressed by a dense `usize` index assigned in the order
//! they appear in the locations file. The external string id is kept on the
//! [`Location`] for export.

pub(crate) mod geo;
mod ingest;
mod matrix;
mod stats;

pub use geo::{trip_distance, EARTH_RADIUS_KM};
pub use ingest::{load_locations, load_trips, merge_duplicate_trips, IngestReport, TripData};
pub use matrix::{build_contact_matrix, ContactMatrix, EdgeDistances, PopulationDerivation};
pub use stats::{network_stats, DegreeBin, NetworkStats};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Population floor applied when the flow-derived population is lower.
pub const POPULATION_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
}

impl Location {
    pub fn new(id: impl Into<String>, lat: f64, lon: f64) -> Result<Self> {
        let id = id.into();
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::invalid(format!("location {id}: latitude {lat} outside [-90, 90]")));
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(Error::invalid(format!("location {id}: longitude {lon} outside [-180, 180]")));
        }
        Ok(Self { id, lat, lon })
    }
}

/// Ordered set of locations with unique ids.
#[derive(Debug, Clone, Default)]
pub struct LocationTable {
    locations: Vec<Location>,
    index: HashMap<String, usize>,
}

impl LocationTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a location and returns its index. Duplicate ids are rejected.
    pub fn push(&mut self, location: Location) -> Result<usize> {
        if self.index.contains_key(&location.id) {
            return Err(Error::invalid(format!("duplicate location id {:?}", location.id)));
        }
        let idx = self.locations.len();
        self.index.insert(location.id.clone(), idx);
        self.locations.push(location);
        Ok(idx)
    }

    pub fn from_locations(locations: impl IntoIterator<Item = Location>) -> Result<Self> {
        let mut table = Self::new();
        for loc in locations {
            table.push(loc)?;
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn get(&self, idx: usize) -> Option<&Location> {
        self.locations.get(idx)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Location> {
        self.locations.iter()
    }

    pub fn as_slice(&self) -> &[Location] {
        &self.locations
    }
}

impl std::ops::Index<usize> for LocationTable {
    type Output = Location;

    fn index(&self, idx: usize) -> &Location {
        &self.locations[idx]
    }
}

/// One directed movement aggregate: `count` trips from `origin` to
/// `destination` during `hour`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripRecord {
    pub origin: usize,
    pub destination: usize,
    pub hour: u8,
    pub count: u64,
}

use serde::{Deserialize, Serialize};

use super::{geo::trip_distance, LocationTable, TripRecord, POPULATION_FLOOR};
use crate::error::{Error, Result};

/// Daily directed flow matrix over `n` locations.
///
/// Entry `m[j][k]` is the number of daily trips from origin `k` to
/// destination `j`. Off-diagonal entries are stored row-wise (one row per
/// destination, origins ascending); the diagonal is kept in `self_flows`.
/// Explicit zero entries are allowed so that subsampled matrices can share
/// the sparsity pattern (and therefore the [`EdgeDistances`]) of their
/// parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactMatrix {
    row_ptr: Vec<usize>,
    origins: Vec<usize>,
    flows: Vec<f64>,
    self_flows: Vec<f64>,
    populations: Vec<f64>,
    clamped: Vec<usize>,
}

/// Result of applying the population formula to a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationDerivation {
    pub populations: Vec<f64>,
    /// Locations whose raw value fell below [`POPULATION_FLOOR`].
    pub clamped: Vec<usize>,
}

impl ContactMatrix {
    /// Builds a matrix from `(destination, origin, flow)` triples. Repeated
    /// pairs are summed. Populations are derived from the flows.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut self_flows = vec![0.0; n];
        let mut off: Vec<(usize, usize, f64)> = Vec::new();
        for (dest, origin, flow) in entries {
            if dest >= n || origin >= n {
                return Err(Error::invalid(format!("entry ({dest}, {origin}) outside a {n}-location matrix")));
            }
            if !(flow >= 0.0 && flow.is_finite()) {
                return Err(Error::invalid(format!("flow {flow} at ({dest}, {origin}) is not a finite nonnegative number")));
            }
            if dest == origin {
                self_flows[dest] += flow;
            } else {
                off.push((dest, origin, flow));
            }
        }
        off.sort_by_key(|&(d, o, _)| (d, o));

        let mut row_ptr = vec![0usize; n + 1];
        let mut origins = Vec::with_capacity(off.len());
        let mut flows: Vec<f64> = Vec::with_capacity(off.len());
        let mut last: Option<(usize, usize)> = None;
        for (dest, origin, flow) in off {
            if last == Some((dest, origin)) {
                *flows.last_mut().expect("previous entry") += flow;
                continue;
            }
            last = Some((dest, origin));
            row_ptr[dest + 1] += 1;
            origins.push(origin);
            flows.push(flow);
        }
        for j in 0..n {
            row_ptr[j + 1] += row_ptr[j];
        }

        let mut matrix = Self {
            row_ptr,
            origins,
            flows,
            self_flows,
            populations: Vec::new(),
            clamped: Vec::new(),
        };
        let derived = matrix.derive_populations();
        if !derived.clamped.is_empty() {
            log::warn!(
                "{} of {} locations clamped to the population floor {POPULATION_FLOOR}",
                derived.clamped.len(),
                n
            );
        }
        matrix.populations = derived.populations;
        matrix.clamped = derived.clamped;
        Ok(matrix)
    }

    pub fn len(&self) -> usize {
        self.self_flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.self_flows.is_empty()
    }

    /// Number of stored off-diagonal entries, including explicit zeros.
    pub fn stored_entries(&self) -> usize {
        self.flows.len()
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn self_flows(&self) -> &[f64] {
        &self.self_flows
    }

    /// Locations that were clamped to the population floor.
    pub fn clamped_locations(&self) -> &[usize] {
        &self.clamped
    }

    /// Off-diagonal inflows to `dest` as `(origin, flow)`.
    pub fn row(&self, dest: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[dest]..self.row_ptr[dest + 1];
        self.origins[range.clone()].iter().copied().zip(self.flows[range].iter().copied())
    }

    /// All off-diagonal entries as `(dest, origin, flow)` in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).flat_map(move |j| self.row(j).map(move |(k, m)| (j, k, m)))
    }

    /// `m[dest][origin]`, including the diagonal.
    pub fn get(&self, dest: usize, origin: usize) -> f64 {
        if dest == origin {
            return self.self_flows[dest];
        }
        let range = self.row_ptr[dest]..self.row_ptr[dest + 1];
        match self.origins[range.clone()].binary_search(&origin) {
            Ok(pos) => self.flows[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// Off-diagonal inflow `Σ_{k≠j} m[j][k]` per location.
    pub fn inflows(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.row(j).map(|(_, m)| m).sum()).collect()
    }

    /// Off-diagonal outflow `Σ_{k≠j} m[k][j]` per location.
    pub fn outflows(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (_, k, m) in self.entries() {
            out[k] += m;
        }
        out
    }

    /// Sum of every entry, diagonal included.
    pub fn total_flow(&self) -> f64 {
        self.flows.iter().sum::<f64>() + self.self_flows.iter().sum::<f64>()
    }

    /// `N_j = (m_jj + Σ_k m_jk − Σ_k m_kj) / 24`, floored at
    /// [`POPULATION_FLOOR`].
    pub fn derive_populations(&self) -> PopulationDerivation {
        let inflow = self.inflows();
        let outflow = self.outflows();
        let mut clamped = Vec::new();
        let populations = (0..self.len())
            .map(|j| {
                let raw = (self.self_flows[j] + inflow[j] - outflow[j]) / 24.0;
                if raw < POPULATION_FLOOR {
                    clamped.push(j);
                    POPULATION_FLOOR
                } else {
                    raw
                }
            })
            .collect();
        PopulationDerivation { populations, clamped }
    }

    /// Returns a matrix with the same sparsity pattern and populations whose
    /// flows are produced by `f(entry_index, flow)`. Self-flows map through
    /// `f_self(location, flow)`.
    pub(crate) fn map_flows(
        &self,
        mut f: impl FnMut(usize, f64) -> f64,
        mut f_self: impl FnMut(usize, f64) -> f64,
    ) -> Self {
        Self {
            row_ptr: self.row_ptr.clone(),
            origins: self.origins.clone(),
            flows: self.flows.iter().enumerate().map(|(i, &m)| f(i, m)).collect(),
            self_flows: self.self_flows.iter().enumerate().map(|(j, &m)| f_self(j, m)).collect(),
            populations: self.populations.clone(),
            clamped: self.clamped.clone(),
        }
    }

    pub(crate) fn flows(&self) -> &[f64] {
        &self.flows
    }

    /// True when both matrices store the same (destination, origin) entries.
    pub fn same_pattern(&self, other: &ContactMatrix) -> bool {
        self.row_ptr == other.row_ptr && self.origins == other.origins
    }

    /// Replaces the populations, e.g. when a subsample should keep its
    /// parent's populations.
    pub fn with_populations(mut self, populations: Vec<f64>) -> Result<Self> {
        if populations.len() != self.len() {
            return Err(Error::invalid(format!(
                "{} populations for a {}-location matrix",
                populations.len(),
                self.len()
            )));
        }
        if let Some(bad) = populations.iter().find(|p| !(p.is_finite() && **p >= POPULATION_FLOOR)) {
            return Err(Error::invalid(format!("population {bad} below the floor {POPULATION_FLOOR}")));
        }
        self.populations = populations;
        self.clamped.clear();
        Ok(self)
    }
}

/// Aggregates validated trip records over all hours into a daily matrix on
/// `n` locations.
pub fn build_contact_matrix(n: usize, trips: &[TripRecord]) -> Result<ContactMatrix> {
    ContactMatrix::from_entries(
        n,
        trips.iter().map(|t| (t.destination, t.origin, t.count as f64)),
    )
}

/// Great-circle distance of every stored off-diagonal entry, aligned with the
/// matrix storage order. Self-flows have distance zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDistances {
    km: Vec<f64>,
}

impl EdgeDistances {
    pub fn compute(matrix: &ContactMatrix, locations: &LocationTable) -> Result<Self> {
        if locations.len() != matrix.len() {
            return Err(Error::invalid(format!(
                "{} locations for a {}-location matrix",
                locations.len(),
                matrix.len()
            )));
        }
        let km = matrix
            .entries()
            .map(|(j, k, _)| trip_distance(&locations[k], &locations[j]))
            .collect();
        Ok(Self { km })
    }

    /// Distances aligned with [`ContactMatrix::entries`].
    pub fn as_slice(&self) -> &[f64] {
        &self.km
    }

    pub fn len(&self) -> usize {
        self.km.len()
    }

    pub fn is_empty(&self) -> bool {
        self.km.is_empty()
    }

    pub(crate) fn check(&self, matrix: &ContactMatrix) -> Result<()> {
        if self.km.len() != matrix.stored_entries() {
            return Err(Error::invalid(format!(
                "distance table has {} entries, matrix has {}",
                self.km.len(),
                matrix.stored_entries()
            )));
        }
        Ok(())
    }
}

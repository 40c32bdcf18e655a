use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::seeds::derive_seed;
use super::city::generate_synthetic_city;
use super::stats::StatSummary;
use crate::engine::{run_simulation, seed_outbreak, PrevalenceSeries, SeedRule};
use crate::error::{Error, Result};
use crate::metrics::{compare, ComparisonReport};
use crate::mobility::{build_contact_matrix, load_trips, ContactMatrix, EdgeDistances, LocationTable};
use crate::transit::{
    distance_histogram, enumerate_param_pairs, sample_transit_matrix, trip_masses, DeltaBand, DistanceHistogram,
    GammaTripModel, ParamPair, TripMass,
};

/// Locations, full matrix, and per-entry distances shared by every run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub locations: LocationTable,
    pub matrix: ContactMatrix,
    pub distances: EdgeDistances,
}

impl Scenario {
    pub fn new(locations: LocationTable, matrix: ContactMatrix) -> Result<Self> {
        let distances = EdgeDistances::compute(&matrix, &locations)?;
        Ok(Self { locations, matrix, distances })
    }

    /// Loads the configured trip files, or generates the synthetic city.
    pub fn from_config(config: &ScenarioConfig) -> Result<Self> {
        match &config.input {
            Some(input) => {
                let data = load_trips(&input.trips, &input.locations)?;
                let matrix = build_contact_matrix(data.locations.len(), &data.trips)?;
                Self::new(data.locations, matrix)
            }
            None => {
                let city = generate_synthetic_city(&config.city)?;
                Self::new(city.locations, city.matrix)
            }
        }
    }

    pub fn trip_masses(&self) -> Result<Vec<TripMass>> {
        trip_masses(&self.matrix, &self.distances)
    }
}

/// A calibrated `(band, k, θ)` cell and its sampled transit matrix.
#[derive(Debug, Clone)]
pub struct TransitCell {
    pub band_index: usize,
    pub band: DeltaBand,
    pub pair: ParamPair,
    pub model: GammaTripModel,
    pub transit_seed: u64,
    pub matrix: ContactMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub band: String,
    pub k: u32,
    pub theta: u32,
    pub reason: String,
}

/// Calibrates λ for every pair of every band and samples the transit
/// matrices. Cells whose mode share cannot be reached are skipped.
pub fn build_transit_cells(config: &ScenarioConfig, scenario: &Scenario) -> Result<(Vec<TransitCell>, Vec<SkippedCell>)> {
    let masses = scenario.trip_masses()?;
    let mut specs = Vec::new();
    for (band_index, &band) in config.delta_bands.iter().enumerate() {
        let pairs = enumerate_param_pairs(
            band,
            config.k_range[0]..=config.k_range[1],
            config.theta_range[0]..=config.theta_range[1],
        );
        specs.extend(pairs.into_iter().map(|pair| (band_index, band, pair)));
    }
    let built: Vec<Result<TransitCell, SkippedCell>> = specs
        .par_iter()
        .map(|&(band_index, band, pair)| {
            let skip = |reason: String| SkippedCell { band: band.label(), k: pair.k, theta: pair.theta, reason };
            let mut model = GammaTripModel::from_pair(pair, config.mu).map_err(|e| skip(e.to_string()))?;
            model.calibrate(&masses).map_err(|e| skip(e.to_string()))?;
            let transit_seed = transit_seed(config.master_seed, band_index, pair);
            let matrix = sample_transit_matrix(&scenario.matrix, &scenario.distances, &model, transit_seed)
                .map_err(|e| skip(e.to_string()))?;
            Ok(TransitCell { band_index, band, pair, model, transit_seed, matrix })
        })
        .collect();
    let mut cells = Vec::new();
    let mut skipped = Vec::new();
    for b in built {
        match b {
            Ok(c) => cells.push(c),
            Err(s) => {
                log::warn!("skipping cell {} k={} theta={}: {}", s.band, s.k, s.theta, s.reason);
                skipped.push(s);
            }
        }
    }
    Ok((cells, skipped))
}

fn transit_seed(master: u64, band_index: usize, pair: ParamPair) -> u64 {
    derive_seed(master, "transit", &[band_index as u64, u64::from(pair.k), u64::from(pair.theta)])
}

fn seed_location_seed(master: u64, draw: usize) -> u64 {
    derive_seed(master, "seed-location", &[draw as u64])
}

fn intro_seed(master: u64, disease: usize, draw: usize, replicate: usize) -> u64 {
    derive_seed(master, "introduction", &[disease as u64, draw as u64, replicate as u64])
}

/// Everything needed to replay one paired comparison given the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub run_index: usize,
    pub disease: String,
    pub disease_index: usize,
    pub band: String,
    pub band_index: usize,
    pub k: u32,
    pub theta: u32,
    pub lambda: f64,
    pub seed_draw: usize,
    pub replicate: usize,
    pub seed_location: usize,
    pub intro_seed: u64,
    pub transit_seed: u64,
    pub config_hash: String,
    pub report: ComparisonReport,
}

/// Per-cell aggregates of the comparison statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub disease: String,
    pub r0: f64,
    pub band: String,
    pub k: u32,
    pub theta: u32,
    pub lambda: f64,
    pub runs: usize,
    pub early_warning: StatSummary,
    pub peak_timing: StatSummary,
    pub peak_magnitude: StatSummary,
    pub situational_awareness: StatSummary,
    /// One summary per configured location threshold, in config order.
    pub locations_timing: Vec<(f64, StatSummary)>,
}

/// First seed draw and replicate of one cell, for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCurve {
    pub disease: String,
    pub band: String,
    pub k: u32,
    pub theta: u32,
    pub prevalence_mpt: Vec<f64>,
    pub prevalence_ptt: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitHistogram {
    pub band: String,
    pub k: u32,
    pub theta: u32,
    pub histogram: DistanceHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config_hash: String,
    pub location_thresholds_pct: Vec<f64>,
    /// Baseline runs plus transit runs:
    /// `diseases × draws × replicates × (1 + cells)`.
    pub total_simulations: usize,
    pub cells: Vec<CellSummary>,
    pub skipped: Vec<SkippedCell>,
    pub ledger: Vec<LedgerEntry>,
    pub full_histogram: Option<DistanceHistogram>,
    /// First pair of each band.
    pub transit_histograms: Vec<TransitHistogram>,
    /// First pair of each band, per disease.
    pub sample_curves: Vec<SampleCurve>,
}

impl SweepResult {
    pub fn paired_runs(&self) -> usize {
        self.ledger.len()
    }
}

pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult> {
    config.validate()?;
    let scenario = Scenario::from_config(config)?;
    run_sweep_on(config, &scenario)
}

/// Runs the sweep on an already built scenario.
///
/// For each disease, seed draw, and replicate, one baseline run on the full
/// matrix is paired with one run on every transit matrix. Paired runs share
/// the seed location and the introduction RNG stream.
pub fn run_sweep_on(config: &ScenarioConfig, scenario: &Scenario) -> Result<SweepResult> {
    config.validate()?;
    let config_hash = config.config_hash();
    let (cells, skipped) = build_transit_cells(config, scenario)?;
    let compare_cfg = config.compare_config();

    let seed_locations = (0..config.seed_draws)
        .map(|d| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed_location_seed(config.master_seed, d));
            seed_outbreak(&scenario.matrix, config.seed_rule, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let params = config.diseases.iter().map(|d| config.params(d)).collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize, usize)> = (0..config.diseases.len())
        .flat_map(|di| (0..config.seed_draws).flat_map(move |d| (0..config.replicates).map(move |r| (di, d, r))))
        .collect();

    type JobOut = (Vec<(usize, ComparisonReport)>, Option<(PrevalenceSeries, Vec<PrevalenceSeries>)>);
    let outputs: Vec<Result<JobOut>> = jobs
        .par_iter()
        .map(|&(di, d, r)| {
            let seed = intro_seed(config.master_seed, di, d, r);
            let rule = SeedRule::Fixed(seed_locations[d]);
            let baseline = run_simulation(&scenario.matrix, &params[di], rule, seed)?;
            let keep_curves = d == 0 && r == 0;
            let mut reports = Vec::with_capacity(cells.len());
            let mut transit_runs = Vec::new();
            for (ci, cell) in cells.iter().enumerate() {
                let run = run_simulation(&cell.matrix, &params[di], rule, seed)?;
                reports.push((ci, compare(&run, &baseline, &compare_cfg)?));
                if keep_curves {
                    transit_runs.push(run);
                }
            }
            Ok((reports, keep_curves.then_some((baseline, transit_runs))))
        })
        .collect();

    let mut ledger = Vec::with_capacity(jobs.len() * cells.len());
    let mut sample_curves = Vec::new();
    for (&(di, d, r), out) in jobs.iter().zip(outputs) {
        let (reports, curves) = out?;
        for (ci, report) in reports {
            let cell = &cells[ci];
            ledger.push(LedgerEntry {
                run_index: 0,
                disease: config.diseases[di].name.clone(),
                disease_index: di,
                band: cell.band.label(),
                band_index: cell.band_index,
                k: cell.pair.k,
                theta: cell.pair.theta,
                lambda: cell.model.lambda.expect("calibrated"),
                seed_draw: d,
                replicate: r,
                seed_location: seed_locations[d],
                intro_seed: intro_seed(config.master_seed, di, d, r),
                transit_seed: cell.transit_seed,
                config_hash: config_hash.clone(),
                report,
            });
        }
        if let Some((baseline, runs)) = curves {
            let mut seen_band = Vec::new();
            for (cell, run) in cells.iter().zip(runs) {
                if seen_band.contains(&cell.band_index) {
                    continue;
                }
                seen_band.push(cell.band_index);
                sample_curves.push(SampleCurve {
                    disease: config.diseases[di].name.clone(),
                    band: cell.band.label(),
                    k: cell.pair.k,
                    theta: cell.pair.theta,
                    prevalence_mpt: baseline.prevalence.clone(),
                    prevalence_ptt: run.prevalence,
                });
            }
        }
    }
    // canonical order: disease, band, pair, draw, replicate
    ledger.sort_by_key(|e| (e.disease_index, e.band_index, e.k, e.theta, e.seed_draw, e.replicate));
    for (i, e) in ledger.iter_mut().enumerate() {
        e.run_index = i;
    }

    let summaries = summarize(config, &cells, &ledger);

    let full_histogram = if scenario.matrix.stored_entries() > 0 {
        Some(distance_histogram(&scenario.matrix, &scenario.distances, config.histogram_bin_km)?)
    } else {
        None
    };
    let mut transit_histograms = Vec::new();
    let mut seen_band = Vec::new();
    for cell in &cells {
        if !seen_band.contains(&cell.band_index) {
            seen_band.push(cell.band_index);
            transit_histograms.push(TransitHistogram {
                band: cell.band.label(),
                k: cell.pair.k,
                theta: cell.pair.theta,
                histogram: distance_histogram(&cell.matrix, &scenario.distances, config.histogram_bin_km)?,
            });
        }
    }

    let total_simulations = config.diseases.len() * config.seed_draws * config.replicates * (1 + cells.len());
    log::info!(
        "sweep finished: {} simulations, {} paired comparisons, {} cells skipped",
        total_simulations,
        ledger.len(),
        skipped.len()
    );
    Ok(SweepResult {
        config_hash,
        location_thresholds_pct: config.location_thresholds_pct.clone(),
        total_simulations,
        cells: summaries,
        skipped,
        ledger,
        full_histogram,
        transit_histograms,
        sample_curves,
    })
}

fn summarize(config: &ScenarioConfig, cells: &[TransitCell], ledger: &[LedgerEntry]) -> Vec<CellSummary> {
    let mut groups: BTreeMap<(usize, usize, u32, u32), Vec<&ComparisonReport>> = BTreeMap::new();
    for e in ledger {
        groups.entry((e.disease_index, e.band_index, e.k, e.theta)).or_default().push(&e.report);
    }
    let lambda_of = |band_index: usize, k: u32, theta: u32| {
        cells
            .iter()
            .find(|c| c.band_index == band_index && c.pair.k == k && c.pair.theta == theta)
            .and_then(|c| c.model.lambda)
            .unwrap_or(f64::NAN)
    };
    groups
        .into_iter()
        .map(|((di, bi, k, theta), reports)| {
            let disease = &config.diseases[di];
            let locations_timing = config
                .location_thresholds_pct
                .iter()
                .map(|&pct| {
                    (pct, StatSummary::from_values(reports.iter().map(|r| r.location_lag(pct).map(|v| v as f64))))
                })
                .collect();
            CellSummary {
                disease: disease.name.clone(),
                r0: disease.r0(),
                band: config.delta_bands[bi].label(),
                k,
                theta,
                lambda: lambda_of(bi, k, theta),
                runs: reports.len(),
                early_warning: StatSummary::from_values(reports.iter().map(|r| r.early_warning.map(|v| v as f64))),
                peak_timing: StatSummary::from_values(reports.iter().map(|r| Some(r.peak_timing as f64))),
                peak_magnitude: StatSummary::from_values(reports.iter().map(|r| Some(r.peak_magnitude))),
                situational_awareness: StatSummary::from_values(reports.iter().map(|r| Some(r.situational_awareness))),
                locations_timing,
            }
        })
        .collect()
}

/// Recomputes one ledger entry from the configuration alone.
pub fn replay(config: &ScenarioConfig, entry: &LedgerEntry) -> Result<ComparisonReport> {
    let scenario = Scenario::from_config(config)?;
    replay_on(config, &scenario, entry)
}

pub fn replay_on(config: &ScenarioConfig, scenario: &Scenario, entry: &LedgerEntry) -> Result<ComparisonReport> {
    if entry.config_hash != config.config_hash() {
        return Err(Error::invalid(format!(
            "ledger entry was produced by config {}, not {}",
            entry.config_hash,
            config.config_hash()
        )));
    }
    let disease = config
        .diseases
        .get(entry.disease_index)
        .ok_or_else(|| Error::invalid("ledger disease index out of range"))?;
    let params = config.params(disease)?;
    let pair = ParamPair { k: entry.k, theta: entry.theta };
    let mut model = GammaTripModel::from_pair(pair, config.mu)?;
    model.calibrate(&scenario.trip_masses()?)?;
    let transit = sample_transit_matrix(&scenario.matrix, &scenario.distances, &model, entry.transit_seed)?;
    let rule = SeedRule::Fixed(entry.seed_location);
    let baseline = run_simulation(&scenario.matrix, &params, rule, entry.intro_seed)?;
    let run = run_simulation(&transit, &params, rule, entry.intro_seed)?;
    compare(&run, &baseline, &config.compare_config())
}

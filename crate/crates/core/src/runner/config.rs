use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::city::SyntheticCitySpec;
use super::seeds::short_hash;
use crate::engine::{EpidemicParams, HazardVariant, SeedRule, DEFAULT_EXTINCTION_THRESHOLD};
use crate::error::{Error, Result};
use crate::metrics::{CompareConfig, DEFAULT_LOCATION_THRESHOLDS, EARLY_WARNING_LEVEL};
use crate::transit::{DeltaBand, DEFAULT_MODE_SHARE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disease {
    pub name: String,
    pub beta: f64,
    pub gamma: f64,
}

impl Disease {
    pub fn new(name: impl Into<String>, beta: f64, gamma: f64) -> Self {
        Self { name: name.into(), beta, gamma }
    }

    pub fn r0(&self) -> f64 {
        self.beta / self.gamma
    }

    /// 2009 Hong Kong H1N1 influenza.
    pub fn h1n1() -> Self {
        Self::new("h1n1", 0.50, 1.0 / 3.0)
    }

    /// 2010 Taiwan varicella.
    pub fn varicella() -> Self {
        Self::new("varicella", 1.55, 1.0 / 5.0)
    }

    /// Hypothetical diseases with low, mediate, and high transmission.
    pub fn hypothetical() -> [Self; 3] {
        [
            Self::new("hypothetical_low", 2.0, 1.0),
            Self::new("hypothetical_mediate", 5.0, 1.0),
            Self::new("hypothetical_high", 15.0, 1.0),
        ]
    }
}

/// Pre-aggregated trip files to use instead of a synthetic city.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripInput {
    pub trips: PathBuf,
    pub locations: PathBuf,
}

/// Full description of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub diseases: Vec<Disease>,
    pub delta_bands: Vec<DeltaBand>,
    pub mu: f64,
    pub k_range: [u32; 2],
    pub theta_range: [u32; 2],
    pub seed_draws: usize,
    pub replicates: usize,
    pub seed_rule: SeedRule,
    #[serde(rename = "seed")]
    pub master_seed: u64,
    pub horizon: u32,
    pub extinction_threshold: f64,
    pub hazard_variant: HazardVariant,
    /// Situational-awareness lag window; `None` means `horizon / 2`.
    pub max_lag: Option<usize>,
    pub early_warning_level: f64,
    pub location_thresholds_pct: Vec<f64>,
    pub histogram_bin_km: f64,
    /// Used when `input` is absent.
    pub city: SyntheticCitySpec,
    pub input: Option<TripInput>,
    pub output_dir: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let mut diseases = vec![Disease::h1n1(), Disease::varicella()];
        diseases.extend(Disease::hypothetical());
        Self {
            diseases,
            delta_bands: vec![DeltaBand::Low, DeltaBand::Mediate, DeltaBand::High],
            mu: DEFAULT_MODE_SHARE,
            k_range: [2, 50],
            theta_range: [1, 50],
            seed_draws: 100,
            replicates: 30,
            seed_rule: SeedRule::Proportional,
            master_seed: 0,
            horizon: 365,
            extinction_threshold: DEFAULT_EXTINCTION_THRESHOLD,
            hazard_variant: HazardVariant::AsPrinted,
            max_lag: None,
            early_warning_level: EARLY_WARNING_LEVEL,
            location_thresholds_pct: DEFAULT_LOCATION_THRESHOLDS.to_vec(),
            histogram_bin_km: 2.0,
            city: SyntheticCitySpec::default(),
            input: None,
            output_dir: None,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: Self = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.diseases.is_empty() || self.delta_bands.is_empty() {
            return Err(Error::invalid("at least one disease and one delta band are required"));
        }
        if self.seed_draws == 0 || self.replicates == 0 {
            return Err(Error::invalid("seed_draws and replicates must be at least 1"));
        }
        for d in &self.diseases {
            if !(d.beta > 0.0 && d.beta.is_finite()) || !(d.gamma > 0.0 && d.gamma <= 1.0) {
                return Err(Error::invalid(format!(
                    "disease {}: need beta > 0 and gamma in (0, 1], got beta = {}, gamma = {}",
                    d.name, d.beta, d.gamma
                )));
            }
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::invalid(format!("mu = {} must lie in (0, 1)", self.mu)));
        }
        if self.k_range[0] > self.k_range[1] || self.theta_range[0] > self.theta_range[1] {
            return Err(Error::invalid("k_range and theta_range must be [low, high]"));
        }
        if self.k_range[0] < 1 || self.theta_range[0] < 1 {
            return Err(Error::invalid("k and theta must be at least 1"));
        }
        if !(self.histogram_bin_km > 0.0) {
            return Err(Error::invalid("histogram_bin_km must be positive"));
        }
        self.params(&self.diseases[0]).map(|_| ())
    }

    pub fn params(&self, disease: &Disease) -> Result<EpidemicParams> {
        let mut p = EpidemicParams::new(disease.beta, disease.gamma, self.horizon)?;
        p.extinction_threshold = self.extinction_threshold;
        p.hazard_variant = self.hazard_variant;
        p.validate()?;
        Ok(p)
    }

    pub fn compare_config(&self) -> CompareConfig {
        CompareConfig {
            early_warning_level: self.early_warning_level,
            max_lag: Some(self.max_lag.unwrap_or(self.horizon as usize / 2)),
            location_thresholds_pct: self.location_thresholds_pct.clone(),
        }
    }

    /// Hash of the canonical JSON form, recorded with every ledger entry.
    /// The output directory does not take part.
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        short_hash(&bytes)
    }
}

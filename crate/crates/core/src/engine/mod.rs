//! One epidemic realization over a metapopulation.
//!
//! Locations that have never been infected receive a case through a
//! Bernoulli draw on the importation hazard; locations with cases evolve
//! by deterministic discrete-time SIR updates. Time steps are days.

mod series;
mod simulation;

pub use series::PrevalenceSeries;
pub use simulation::{run_simulation, CompartmentState, Simulation};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::ContactMatrix;

pub const DEFAULT_EXTINCTION_THRESHOLD: f64 = 1e-3;

/// Form of the importation hazard.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HazardVariant {
    /// `β S (1 − exp[−Σ_k m_jk x_k S]) / (1 + β S)`.
    #[default]
    AsPrinted,
    /// Same, without the `S` factor inside the exponential.
    NoInnerS,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    /// Transmission rate per day.
    pub beta: f64,
    /// Recovery rate per day.
    pub gamma: f64,
    /// Maximum number of simulated days.
    pub horizon: u32,
    /// Runs stop once total infecteds drop below this.
    pub extinction_threshold: f64,
    #[serde(default)]
    pub hazard_variant: HazardVariant,
}

impl EpidemicParams {
    pub fn new(beta: f64, gamma: f64, horizon: u32) -> Result<Self> {
        let params = Self {
            beta,
            gamma,
            horizon,
            extinction_threshold: DEFAULT_EXTINCTION_THRESHOLD,
            hazard_variant: HazardVariant::AsPrinted,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_variant(mut self, variant: HazardVariant) -> Self {
        self.hazard_variant = variant;
        self
    }

    pub fn validate(&self) -> Result<()> {
        // β = 0 is accepted for degenerate checks
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta = {} must be a nonnegative number", self.beta)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma = {} must lie in (0, 1]", self.gamma)));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon must be at least one day"));
        }
        if !(self.extinction_threshold >= 0.0) {
            return Err(Error::invalid("extinction threshold must be nonnegative"));
        }
        Ok(())
    }

    pub fn r0(&self) -> f64 {
        self.beta / self.gamma
    }
}

/// Probability that fully susceptible location `j` gets its first case on
/// the next day.
///
/// The flow sum runs over origins `k ≠ j`; self-flows do not enter.
pub fn hazard(state: &CompartmentState, matrix: &ContactMatrix, params: &EpidemicParams, j: usize) -> f64 {
    let pressure: f64 = matrix
        .row(j)
        .map(|(k, m)| {
            let i_k = state.infected[k];
            if i_k > 0.0 {
                m * i_k / matrix.populations()[k]
            } else {
                0.0
            }
        })
        .sum();
    hazard_value(params.beta, state.susceptible[j], pressure, params.hazard_variant)
}

/// Hazard from the susceptible count and the flow-weighted prevalence
/// `Σ_k m_jk x_k`.
pub fn hazard_value(beta: f64, susceptible: f64, pressure: f64, variant: HazardVariant) -> f64 {
    if pressure <= 0.0 || beta <= 0.0 {
        return 0.0;
    }
    let exponent = match variant {
        HazardVariant::AsPrinted => pressure * susceptible,
        HazardVariant::NoInnerS => pressure,
    };
    let bs = beta * susceptible;
    (bs * -(-exponent).exp_m1() / (1.0 + bs)).clamp(0.0, 1.0)
}

/// Draws next-day introductions into never-infected locations.
///
/// One uniform is drawn per location per day, whether or not the location
/// is eligible, so two runs sharing a seed see the same draw at every
/// `(day, location)`. Returns the locations that receive a case.
pub fn introduce<R: Rng + ?Sized>(
    state: &CompartmentState,
    matrix: &ContactMatrix,
    params: &EpidemicParams,
    rng: &mut R,
) -> Vec<usize> {
    let mut hits = Vec::new();
    for j in 0..state.len() {
        let u: f64 = rng.random();
        if state.is_virgin(j) && u < hazard(state, matrix, params, j) {
            hits.push(j);
        }
    }
    hits
}

/// Advances every location with cases by one day:
/// `S' = S − βSI/N`, `I' = I + βSI/N − γI`, `R' = R + γI`.
///
/// New infections are capped at `S` so no compartment turns negative; the
/// excess is never created, which keeps `S + I + R = N`.
pub fn sir_step(state: &mut CompartmentState, populations: &[f64], params: &EpidemicParams) {
    for j in 0..state.len() {
        let (s, i, r) = (state.susceptible[j], state.infected[j], state.recovered[j]);
        if i <= 0.0 {
            continue;
        }
        let n = populations[j];
        let infections = (params.beta * s * i / n).min(s);
        let recoveries = params.gamma * i;
        state.susceptible[j] = (s - infections).max(0.0);
        let next_i = i + infections - recoveries;
        if next_i < 0.0 {
            state.infected[j] = 0.0;
            state.recovered[j] = r + recoveries + next_i;
        } else {
            state.infected[j] = next_i;
            state.recovered[j] = r + recoveries;
        }
    }
    state.day += 1;
}

/// How the initially infected location is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedRule {
    /// With probability proportional to population.
    Proportional,
    MostPopulous,
    Fixed(usize),
}

pub fn seed_outbreak<R: Rng + ?Sized>(matrix: &ContactMatrix, rule: SeedRule, rng: &mut R) -> Result<usize> {
    let pops = matrix.populations();
    if pops.is_empty() {
        return Err(Error::invalid("cannot seed an outbreak in an empty matrix"));
    }
    match rule {
        SeedRule::Fixed(j) if j < pops.len() => Ok(j),
        SeedRule::Fixed(j) => Err(Error::invalid(format!("seed location {j} out of range"))),
        SeedRule::MostPopulous => {
            // earliest index wins ties
            let mut best = 0;
            for (j, &p) in pops.iter().enumerate() {
                if p > pops[best] {
                    best = j;
                }
            }
            Ok(best)
        }
        SeedRule::Proportional => {
            let dist = WeightedIndex::new(pops).map_err(|e| Error::invalid(format!("population weights: {e}")))?;
            Ok(dist.sample(rng))
        }
    }
}

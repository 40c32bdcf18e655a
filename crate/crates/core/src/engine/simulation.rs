use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{introduce, seed_outbreak, sir_step, EpidemicParams, PrevalenceSeries, SeedRule};
use crate::error::Result;
use crate::mobility::ContactMatrix;

/// Real-valued compartments of every location on one day.
#[derive(Debug, Clone, PartialEq)]
pub struct CompartmentState {
    pub day: u32,
    pub susceptible: Vec<f64>,
    pub infected: Vec<f64>,
    pub recovered: Vec<f64>,
    /// First day with cases, per location.
    pub onset: Vec<Option<u32>>,
}

impl CompartmentState {
    /// Day zero with everyone susceptible.
    pub fn susceptible(matrix: &ContactMatrix) -> Self {
        let n = matrix.len();
        Self {
            day: 0,
            susceptible: matrix.populations().to_vec(),
            infected: vec![0.0; n],
            recovered: vec![0.0; n],
            onset: vec![None; n],
        }
    }

    pub fn len(&self) -> usize {
        self.susceptible.len()
    }

    pub fn is_empty(&self) -> bool {
        self.susceptible.is_empty()
    }

    /// Never infected: no cases and nobody recovered.
    pub fn is_virgin(&self, j: usize) -> bool {
        self.infected[j] == 0.0 && self.recovered[j] == 0.0
    }

    /// Places a single case in `j` on the current day.
    pub fn seed(&mut self, matrix: &ContactMatrix, j: usize) {
        let n = matrix.populations()[j];
        self.susceptible[j] = n - 1.0;
        self.infected[j] = 1.0;
        self.recovered[j] = 0.0;
        if self.onset[j].is_none() {
            self.onset[j] = Some(self.day);
        }
    }

    pub fn apply_introductions(&mut self, matrix: &ContactMatrix, locations: &[usize]) {
        for &j in locations {
            self.seed(matrix, j);
        }
    }

    pub fn total_susceptible(&self) -> f64 {
        self.susceptible.iter().sum()
    }

    pub fn total_infected(&self) -> f64 {
        self.infected.iter().sum()
    }

    pub fn total_recovered(&self) -> f64 {
        self.recovered.iter().sum()
    }

    pub fn locations_infected(&self) -> usize {
        self.onset.iter().filter(|o| o.is_some()).count()
    }
}

/// A run in progress. Exposes the state between days, which
/// [`run_simulation`] does not.
pub struct Simulation<'a> {
    matrix: &'a ContactMatrix,
    params: EpidemicParams,
    rng: ChaCha8Rng,
    state: CompartmentState,
    series: PrevalenceSeries,
    total_population: f64,
    finished: bool,
}

impl<'a> Simulation<'a> {
    /// Seeds one case at the location chosen by `seed_rule`. The proportional
    /// rule draws from the run's own RNG stream before any introduction.
    pub fn new(matrix: &'a ContactMatrix, params: EpidemicParams, seed_rule: SeedRule, rng_seed: u64) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let seed_location = seed_outbreak(matrix, seed_rule, &mut rng)?;
        let mut state = CompartmentState::susceptible(matrix);
        state.seed(matrix, seed_location);
        Ok(Self::from_state(matrix, params, state, rng_seed, seed_location))
    }

    /// Starts from an arbitrary state, e.g. a fully infected source.
    pub fn from_state(
        matrix: &'a ContactMatrix,
        params: EpidemicParams,
        state: CompartmentState,
        rng_seed: u64,
        seed_location: usize,
    ) -> Self {
        let total_population = matrix.populations().iter().sum();
        let mut sim = Self {
            matrix,
            params,
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
            state,
            series: PrevalenceSeries::empty(seed_location, rng_seed),
            total_population,
            finished: false,
        };
        sim.record();
        sim
    }

    fn record(&mut self) {
        let state = &self.state;
        self.series.push_day(
            state.total_susceptible(),
            state.total_infected(),
            state.total_recovered(),
            state.locations_infected() as f64 / state.len() as f64,
        );
        if state.total_infected() < self.params.extinction_threshold {
            self.finished = true;
        }
    }

    pub fn state(&self) -> &CompartmentState {
        &self.state
    }

    pub fn is_finished(&self) -> bool {
        self.finished || self.state.day >= self.params.horizon
    }

    /// Advances one day. Returns `false` once the horizon is reached or the
    /// epidemic has gone extinct.
    pub fn step(&mut self) -> bool {
        if self.is_finished() {
            return false;
        }
        let hits = introduce(&self.state, self.matrix, &self.params, &mut self.rng);
        sir_step(&mut self.state, self.matrix.populations(), &self.params);
        self.state.apply_introductions(self.matrix, &hits);
        self.record();
        true
    }

    pub fn run(mut self) -> PrevalenceSeries {
        while self.step() {}
        self.into_series()
    }

    pub fn into_series(mut self) -> PrevalenceSeries {
        let remaining = self.state.total_susceptible();
        self.series.final_size = 1.0 - remaining / self.total_population;
        self.series
    }
}

/// Runs one realization to the horizon or extinction.
pub fn run_simulation(
    matrix: &ContactMatrix,
    params: &EpidemicParams,
    seed_rule: SeedRule,
    rng_seed: u64,
) -> Result<PrevalenceSeries> {
    Ok(Simulation::new(matrix, *params, seed_rule, rng_seed)?.run())
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::{geo::haversine_km, ContactMatrix, Location, LocationTable, TripRecord};

const KM_PER_DEGREE: f64 = crate::mobility::EARTH_RADIUS_KM * std::f64::consts::PI / 180.0;

/// Parameters of a synthetic city: locations uniform in a disc, lognormal
/// populations, and gravity flows `∝ N_j N_k exp(−d_jk / d0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticCitySpec {
    pub n_locations: usize,
    /// Radius of the disc.
    pub radius_km: f64,
    pub center_lat: f64,
    pub center_lon: f64,
    /// Mean and standard deviation of log-population.
    pub population_log_mean: f64,
    pub population_log_sd: f64,
    /// Distance decay of the gravity kernel.
    pub d0_km: f64,
    /// Expected inter-location trips per resident per day.
    pub trips_per_capita: f64,
    pub seed: u64,
}

impl Default for SyntheticCitySpec {
    fn default() -> Self {
        Self {
            n_locations: 200,
            radius_km: 40.0,
            center_lat: 43.88,
            center_lon: 125.32,
            population_log_mean: 3000f64.ln(),
            population_log_sd: 0.6,
            d0_km: 8.0,
            trips_per_capita: 0.05,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCity {
    pub locations: LocationTable,
    pub matrix: ContactMatrix,
    /// Population drawn for each location before flows were sampled.
    pub drawn_populations: Vec<f64>,
}

pub fn generate_synthetic_city(spec: &SyntheticCitySpec) -> Result<SyntheticCity> {
    if spec.n_locations < 2 {
        return Err(Error::invalid("a synthetic city needs at least two locations"));
    }
    if !(spec.radius_km > 0.0 && spec.radius_km.is_finite()) {
        return Err(Error::invalid(format!("degenerate spatial extent: radius {} km", spec.radius_km)));
    }
    if !(spec.d0_km > 0.0) || !(spec.trips_per_capita >= 0.0) || !(spec.population_log_sd >= 0.0) {
        return Err(Error::invalid("gravity and population parameters must be positive"));
    }
    let n = spec.n_locations;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let cos_lat = spec.center_lat.to_radians().cos();
    let mut locations = LocationTable::new();
    for i in 0..n {
        let r = spec.radius_km * rng.random::<f64>().sqrt();
        let phi = std::f64::consts::TAU * rng.random::<f64>();
        let lat = spec.center_lat + r * phi.sin() / KM_PER_DEGREE;
        let lon = spec.center_lon + r * phi.cos() / (KM_PER_DEGREE * cos_lat);
        locations.push(Location::new(format!("L{i:04}"), lat, lon)?)?;
    }

    let law = LogNormal::new(spec.population_log_mean, spec.population_log_sd)
        .map_err(|e| Error::invalid(format!("population law: {e}")))?;
    let pops: Vec<f64> = (0..n).map(|_| law.sample(&mut rng).round().max(1.0)).collect();

    let mut kernel = Vec::with_capacity(n * (n - 1));
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let d = haversine_km(locations[j].lat, locations[j].lon, locations[k].lat, locations[k].lon);
                kernel.push((j, k, pops[j] * pops[k] * (-d / spec.d0_km).exp()));
            }
        }
    }
    let kernel_sum: f64 = kernel.iter().map(|e| e.2).sum();
    let scale = if kernel_sum > 0.0 {
        spec.trips_per_capita * pops.iter().sum::<f64>() / kernel_sum
    } else {
        0.0
    };

    let mut entries = Vec::new();
    let (mut inflow, mut outflow) = (vec![0.0; n], vec![0.0; n]);
    for (j, k, w) in kernel {
        let expected = w * scale;
        if expected <= 0.0 {
            continue;
        }
        let count = Poisson::new(expected).expect("positive mean").sample(&mut rng);
        if count > 0.0 {
            entries.push((j, k, count));
            inflow[j] += count;
            outflow[k] += count;
        }
    }
    // self-flows chosen so the population formula recovers the drawn sizes
    for j in 0..n {
        let stay = (24.0 * pops[j] - inflow[j] + outflow[j]).round().max(0.0);
        entries.push((j, j, stay));
    }
    let matrix = ContactMatrix::from_entries(n, entries)?;
    Ok(SyntheticCity {
        locations,
        matrix,
        drawn_populations: pops,
    })
}

impl SyntheticCity {
    /// Hourly trip records that aggregate back to the daily matrix. Each
    /// daily count is spread as evenly as possible over the 24 hours.
    pub fn trip_records(&self) -> Vec<TripRecord> {
        let mut out = Vec::new();
        let mut push = |origin: usize, destination: usize, daily: f64| {
            let daily = daily.round() as u64;
            for hour in 0..24u64 {
                let count = daily / 24 + u64::from(hour < daily % 24);
                if count > 0 {
                    out.push(TripRecord {
                        origin,
                        destination,
                        hour: hour as u8,
                        count,
                    });
                }
            }
        };
        for (j, k, m) in self.matrix.entries() {
            push(k, j, m);
        }
        for (j, &m) in self.matrix.self_flows().iter().enumerate() {
            push(j, j, m);
        }
        out
    }

    pub fn write_locations_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["id", "lat", "lon"])?;
        for loc in self.locations.iter() {
            w.serialize((&loc.id, loc.lat, loc.lon))?;
        }
        w.flush().map_err(|e| Error::io("<locations>", e))?;
        Ok(())
    }

    pub fn write_trips_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["origin", "destination", "hour", "count"])?;
        for t in self.trip_records() {
            w.serialize((&self.locations[t.origin].id, &self.locations[t.destination].id, t.hour, t.count))?;
        }
        w.flush().map_err(|e| Error::io("<trips>", e))?;
        Ok(())
    }

    /// Trip-weighted mean distance of inter-location trips.
    pub fn mean_trip_km(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (j, k, m) in self.matrix.entries() {
            num += m * crate::mobility::trip_distance(&self.locations[j], &self.locations[k]);
            den += m;
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::GammaTripModel;
use crate::error::{Error, Result};
use crate::mobility::{ContactMatrix, EdgeDistances};

fn thin<R: rand::Rng + ?Sized>(trips: f64, p: f64, rng: &mut R) -> f64 {
    let n = trips.round() as u64;
    if n == 0 || p <= 0.0 {
        0.0
    } else if p >= 1.0 {
        n as f64
    } else {
        Binomial::new(n, p).expect("p in (0, 1)").sample(rng) as f64
    }
}

/// Labels each trip of `matrix` independently as transit with probability
/// `min(1, λ·F(d))` and returns the matrix of labeled trips.
///
/// Flows are treated as whole trip counts. The result keeps the sparsity
/// pattern (so `distances` stays valid for it) and the populations of the
/// input. Self-flows use `d = 0`.
pub fn sample_transit_matrix(
    matrix: &ContactMatrix,
    distances: &EdgeDistances,
    model: &GammaTripModel,
    rng_seed: u64,
) -> Result<ContactMatrix> {
    distances.check(matrix)?;
    if model.lambda.is_none() {
        return Err(Error::invalid("transit model has no calibrated lambda"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let km = distances.as_slice();
    let p_self = model.labeling_probability(0.0);
    // entries first, then self-flows; both passes are in storage order
    let sampled: Vec<f64> = matrix
        .flows()
        .iter()
        .zip(km)
        .map(|(&m, &d)| thin(m, model.labeling_probability(d), &mut rng))
        .collect();
    let self_sampled: Vec<f64> = matrix.self_flows().iter().map(|&m| thin(m, p_self, &mut rng)).collect();
    Ok(matrix.map_flows(|i, _| sampled[i], |j, _| self_sampled[j]))
}

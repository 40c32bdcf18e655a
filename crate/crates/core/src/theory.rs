//! Closed-form transmission and invasion probabilities between a fully
//! infected source location and a fully susceptible destination.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::ContactMatrix;

/// Coefficient multiplying `m_ji·n_j` in the exponent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvasionVariant {
    /// `β/γ = R₀`, matching the small-flow limit `R₀·m_ji·n_j`.
    #[default]
    R0Consistent,
    /// `β·γ`.
    AsPrinted,
}

impl InvasionVariant {
    fn coefficient(self, beta: f64, gamma: f64) -> f64 {
        match self {
            InvasionVariant::R0Consistent => beta / gamma,
            InvasionVariant::AsPrinted => beta * gamma,
        }
    }
}

fn check_rates(beta: f64, gamma: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) || !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("rates beta = {beta}, gamma = {gamma} out of domain")));
    }
    Ok(())
}

/// `P_ji = 1 − exp(−c·m_ji·n_j / n_i)` with `c` set by the variant.
pub fn transmission_probability(
    beta: f64,
    gamma: f64,
    m_ji: f64,
    n_i: f64,
    n_j: f64,
    variant: InvasionVariant,
) -> Result<f64> {
    check_rates(beta, gamma)?;
    if !(n_i > 0.0) {
        return Err(Error::invalid(format!("source population n_i = {n_i} must be positive")));
    }
    if m_ji < 0.0 || n_j < 0.0 {
        return Err(Error::invalid("flows and populations must be nonnegative"));
    }
    let x = variant.coefficient(beta, gamma) * m_ji * n_j / n_i;
    Ok(-(-x).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairInvasion {
    /// Per-traveller transmission probability; only known when the source
    /// population is supplied.
    pub p_transmit: Option<f64>,
    pub p_invade: f64,
    /// `R₀·m_ji·n_j`.
    pub linear_approx: f64,
    /// `(linear_approx − p_invade) / linear_approx`, zero when both vanish.
    pub relative_gap: f64,
}

impl PairInvasion {
    pub fn with_source_population(mut self, beta: f64, gamma: f64, m_ji: f64, n_i: f64, n_j: f64, variant: InvasionVariant) -> Result<Self> {
        self.p_transmit = Some(transmission_probability(beta, gamma, m_ji, n_i, n_j, variant)?);
        Ok(self)
    }
}

/// `Θ_ji = 1 − exp(−c·m_ji·n_j)` and its small-flow linearization.
pub fn invasion_probability(beta: f64, gamma: f64, m_ji: f64, n_j: f64, variant: InvasionVariant) -> Result<PairInvasion> {
    check_rates(beta, gamma)?;
    if m_ji < 0.0 || n_j < 0.0 {
        return Err(Error::invalid("flows and populations must be nonnegative"));
    }
    let x = variant.coefficient(beta, gamma) * m_ji * n_j;
    let p_invade = -(-x).exp_m1();
    let linear_approx = beta / gamma * m_ji * n_j;
    let relative_gap = if linear_approx > 0.0 {
        (linear_approx - p_invade) / linear_approx
    } else {
        0.0
    };
    Ok(PairInvasion {
        p_transmit: None,
        p_invade,
        linear_approx,
        relative_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedInvasion {
    pub dest: usize,
    pub theta: f64,
}

/// Invasion probability from `source` into every other location, highest
/// first (lower index first on ties). Uses `m[j][source]` and `N_j` from the
/// matrix.
pub fn invasion_ranking(
    matrix: &ContactMatrix,
    source: usize,
    beta: f64,
    gamma: f64,
    variant: InvasionVariant,
) -> Result<Vec<RankedInvasion>> {
    if source >= matrix.len() {
        return Err(Error::invalid(format!("source {source} out of range")));
    }
    let pops = matrix.populations();
    let mut ranked = (0..matrix.len())
        .filter(|&j| j != source)
        .map(|j| {
            let theta = invasion_probability(beta, gamma, matrix.get(j, source), pops[j], variant)?.p_invade;
            Ok(RankedInvasion { dest: j, theta })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.theta.total_cmp(&a.theta).then(a.dest.cmp(&b.dest)));
    Ok(ranked)
}

/// One row of the full-versus-transit ranking export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub source_id: String,
    pub dest_id: String,
    pub theta: f64,
    pub theta_transit: f64,
    /// `theta_transit / theta`; `None` when `theta` is zero.
    pub ratio: Option<f64>,
}

/// Pairs the rankings of a matrix and its transit subsample, ordered by the
/// full-matrix Θ.
pub fn ranking_rows(
    full: &ContactMatrix,
    transit: &ContactMatrix,
    ids: &[String],
    source: usize,
    beta: f64,
    gamma: f64,
    variant: InvasionVariant,
) -> Result<Vec<RankingRow>> {
    if ids.len() != full.len() || transit.len() != full.len() {
        return Err(Error::invalid("matrices and id list must cover the same locations"));
    }
    let mut transit_theta = vec![0.0; full.len()];
    for r in invasion_ranking(transit, source, beta, gamma, variant)? {
        transit_theta[r.dest] = r.theta;
    }
    Ok(invasion_ranking(full, source, beta, gamma, variant)?
        .into_iter()
        .map(|r| RankingRow {
            source_id: ids[source].clone(),
            dest_id: ids[r.dest].clone(),
            theta: r.theta,
            theta_transit: transit_theta[r.dest],
            ratio: (r.theta > 0.0).then(|| transit_theta[r.dest] / r.theta),
        })
        .collect())
}

/// CSV with header `source_id,dest_id,theta,theta_transit,ratio`.
pub fn write_ranking_csv<W: std::io::Write>(rows: &[RankingRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["source_id", "dest_id", "theta", "theta_transit", "ratio"])?;
    for r in rows {
        w.serialize((&r.source_id, &r.dest_id, r.theta, r.theta_transit, r.ratio))?;
    }
    w.flush().map_err(|e| Error::io("<ranking>", e))?;
    Ok(())
}

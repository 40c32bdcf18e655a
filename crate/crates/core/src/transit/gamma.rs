use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Gamma density `d^{k−1} e^{−d/θ} / (Γ(k) θ^k)` at distance `d`.
pub fn gamma_pdf(d: f64, k: f64, theta: f64) -> Result<f64> {
    if d < 0.0 || d.is_nan() {
        return Err(Error::invalid(format!("distance {d} is negative")));
    }
    if !(k >= 1.0 && k.is_finite()) || !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::invalid(format!("gamma parameters k = {k}, theta = {theta} out of domain")));
    }
    if d == 0.0 {
        return Ok(if k == 1.0 { 1.0 / theta } else { 0.0 });
    }
    if d.is_infinite() {
        return Ok(0.0);
    }
    let ln = (k - 1.0) * d.ln() - d / theta - ln_gamma(k) - k * theta.ln();
    Ok(ln.exp())
}

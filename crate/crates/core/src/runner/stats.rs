use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Mean and sample standard deviation of the uncensored values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub n: usize,
    /// NaN when every value was censored; stored as `null` in JSON.
    #[serde(deserialize_with = "nan_if_null")]
    pub mean: f64,
    #[serde(deserialize_with = "nan_if_null")]
    pub sd: f64,
    pub censored: usize,
}

fn nan_if_null<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl StatSummary {
    pub fn from_values(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let mut n = 0;
        let mut censored = 0;
        let mut kept = Vec::new();
        for v in values {
            match v {
                Some(x) if x.is_finite() => {
                    kept.push(x);
                    n += 1;
                }
                _ => censored += 1,
            }
        }
        let (mean, sd) = mean_sd(&kept);
        Self { n, mean, sd, censored }
    }
}

/// Mean and sample standard deviation; `(NaN, NaN)` when empty, sd zero for
/// a single value.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Percentile bootstrap interval for `statistic` over resamples of `values`.
///
/// Resampling is over whole items, so paired data stays paired when each
/// item carries both members.
pub fn bootstrap_ci<T: Copy>(
    values: &[T],
    statistic: impl Fn(&[T]) -> f64,
    resamples: usize,
    level: f64,
    seed: u64,
) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = values.to_vec();
    let mut stats: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = values[rng.random_range(0..values.len())];
            }
            statistic(&buf)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    let at = |q: f64| stats[((q * resamples as f64).floor() as usize).min(resamples - 1)];
    (at(alpha), at(1.0 - alpha))
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

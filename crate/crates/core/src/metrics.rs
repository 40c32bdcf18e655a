//! Scores for a transit-driven run (PTT) against a full-mobility run (MPT).
//!
//! Day differences are taken as `MPT − PTT`, so a negative value means the
//! transit run lags behind.

use serde::{Deserialize, Serialize};

use crate::engine::PrevalenceSeries;
use crate::error::{Error, Result};

/// Lags whose overlap is shorter than this are not considered.
pub const MIN_OVERLAP_DAYS: usize = 10;
pub const EARLY_WARNING_LEVEL: f64 = 0.01;
pub const DEFAULT_LOCATION_THRESHOLDS: [f64; 2] = [20.0, 80.0];

/// First day with `series[t] >= level`.
pub fn threshold_day(series: &[f64], level: f64) -> Option<usize> {
    series.iter().position(|&v| v >= level)
}

/// Day and value of the maximum, earliest day on ties.
pub fn peak(series: &[f64]) -> Result<(usize, f64)> {
    let (mut day, mut best) = (0, *series.first().ok_or(Error::EmptySeries)?);
    for (t, &v) in series.iter().enumerate().skip(1) {
        if v > best {
            day = t;
            best = v;
        }
    }
    Ok((day, best))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    /// `1 − min_λ Σ|x_t − y_{t+λ}| / Σ|x_t + y_{t+λ}|`.
    pub value: f64,
    /// Minimizing lag; smallest magnitude wins ties, negative first.
    pub lag: i64,
}

fn normalized_error(x: &[f64], y: &[f64], lag: i64) -> Option<f64> {
    let start = (-lag).max(0);
    let end = (x.len() as i64).min(y.len() as i64 - lag);
    if end - start < MIN_OVERLAP_DAYS as i64 {
        return None;
    }
    let (mut num, mut den) = (0.0, 0.0);
    for t in start..end {
        let (a, b) = (x[t as usize], y[(t + lag) as usize]);
        num += (a - b).abs();
        den += (a + b).abs();
    }
    Some(if den > 0.0 { num / den } else { 0.0 })
}

/// Complement of the lag-minimized normalized absolute error between the
/// transit series `x` and the mobility series `y`.
///
/// At lag `λ` the sums run over the days where both `x_t` and `y_{t+λ}`
/// exist; lags with fewer than [`MIN_OVERLAP_DAYS`] such days are skipped.
pub fn situational_awareness(x: &[f64], y: &[f64], max_lag: usize) -> Result<Alignment> {
    let max_lag = max_lag as i64;
    let mut best: Option<(f64, i64)> = None;
    // visit 0, -1, 1, -2, 2, ... so ties keep the smallest |λ|
    let lags = std::iter::once(0).chain((1..=max_lag).flat_map(|l| [-l, l]));
    for lag in lags {
        if let Some(err) = normalized_error(x, y, lag) {
            if best.is_none_or(|(b, _)| err < b) {
                best = Some((err, lag));
            }
        }
    }
    let (err, lag) = best.ok_or(Error::NoAdmissibleLag {
        x_len: x.len(),
        y_len: y.len(),
        min_overlap: MIN_OVERLAP_DAYS,
    })?;
    Ok(Alignment {
        value: (1.0 - err).clamp(0.0, 1.0),
        lag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationsTiming {
    /// Percent of locations, e.g. `20.0`.
    pub threshold_pct: f64,
    /// `l^MPT − l^PTT`; `None` when either run never reaches the threshold.
    pub lag_days: Option<i64>,
}

/// Timing gap of reaching each percentage of ever-infected locations.
pub fn locations_timing(transit: &PrevalenceSeries, mobile: &PrevalenceSeries, thresholds_pct: &[f64]) -> Vec<LocationsTiming> {
    thresholds_pct
        .iter()
        .map(|&pct| {
            let level = pct / 100.0;
            let ptt = threshold_day(&transit.frac_locations_infected, level);
            let mpt = threshold_day(&mobile.frac_locations_infected, level);
            LocationsTiming {
                threshold_pct: pct,
                lag_days: day_gap(mpt, ptt),
            }
        })
        .collect()
}

fn day_gap(mpt: Option<usize>, ptt: Option<usize>) -> Option<i64> {
    Some(mpt? as i64 - ptt? as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    /// Prevalence level for the early-warning statistic.
    pub early_warning_level: f64,
    /// Largest lag searched by situational awareness. `None` uses half the
    /// longer series.
    pub max_lag: Option<usize>,
    pub location_thresholds_pct: Vec<f64>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            early_warning_level: EARLY_WARNING_LEVEL,
            max_lag: None,
            location_thresholds_pct: DEFAULT_LOCATION_THRESHOLDS.to_vec(),
        }
    }
}

impl CompareConfig {
    /// Default settings with `max_lag = horizon / 2`.
    pub fn for_horizon(horizon: u32) -> Self {
        Self {
            max_lag: Some(horizon as usize / 2),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// `t_1%^MPT − t_1%^PTT`; `None` when censored.
    pub early_warning: Option<i64>,
    /// `t_peak^MPT − t_peak^PTT`.
    pub peak_timing: i64,
    /// `r_peak^PTT / r_peak^MPT`.
    pub peak_magnitude: f64,
    pub situational_awareness: f64,
    pub awareness_lag: i64,
    pub locations_timing: Vec<LocationsTiming>,
}

impl ComparisonReport {
    pub fn location_lag(&self, threshold_pct: f64) -> Option<i64> {
        self.locations_timing
            .iter()
            .find(|l| l.threshold_pct == threshold_pct)
            .and_then(|l| l.lag_days)
    }
}

/// Scores the transit run against the mobility run.
///
/// Situational awareness is computed on prevalence curves zero-padded to a
/// common length of at least [`MIN_OVERLAP_DAYS`].
pub fn compare(transit: &PrevalenceSeries, mobile: &PrevalenceSeries, config: &CompareConfig) -> Result<ComparisonReport> {
    let (x, y) = (&transit.prevalence, &mobile.prevalence);
    let early_warning = day_gap(
        threshold_day(y, config.early_warning_level),
        threshold_day(x, config.early_warning_level),
    );
    let (t_ptt, r_ptt) = peak(x)?;
    let (t_mpt, r_mpt) = peak(y)?;
    let peak_magnitude = if r_mpt > 0.0 {
        r_ptt / r_mpt
    } else if r_ptt > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    // a run that stopped at extinction has zero prevalence afterwards
    let len = x.len().max(y.len()).max(MIN_OVERLAP_DAYS);
    let pad = |s: &[f64]| s.iter().copied().chain(std::iter::repeat(0.0)).take(len).collect::<Vec<f64>>();
    let max_lag = config.max_lag.unwrap_or(x.len().max(y.len()) / 2);
    let sa = situational_awareness(&pad(x), &pad(y), max_lag)?;
    Ok(ComparisonReport {
        early_warning,
        peak_timing: t_mpt as i64 - t_ptt as i64,
        peak_magnitude,
        situational_awareness: sa.value,
        awareness_lag: sa.lag,
        locations_timing: locations_timing(transit, mobile, &config.location_thresholds_pct),
    })
}

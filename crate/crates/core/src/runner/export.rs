use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::stats::{mean_sd, StatSummary};
use super::sweep::SweepResult;
use crate::error::{Error, Result};

const STATISTICS: [&str; 4] = ["early_warning", "peak_timing", "peak_magnitude", "situational_awareness"];

/// Writes the sweep outputs into `dir` and returns the written paths in
/// write order.
///
/// Files: `cells.csv`, `ledger.jsonl`, `r0_panels.csv`,
/// `prevalence_curves.csv`, `hist_full.csv`, one `hist_<band>_k<k>_theta<θ>.csv`
/// per sampled band, `skipped.csv`, `summary.json`, and `sweep_result.json`.
pub fn export_results(result: &SweepResult, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let mut emit = |name: &str, body: &dyn Fn(&mut dyn Write) -> Result<()>| -> Result<()> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };

    emit("cells.csv", &|w| write_cells(result, w))?;
    emit("ledger.jsonl", &|w| {
        for entry in &result.ledger {
            serde_json::to_writer(&mut *w, entry)?;
            w.write_all(b"\n").map_err(|e| Error::io("ledger.jsonl", e))?;
        }
        Ok(())
    })?;
    emit("r0_panels.csv", &|w| write_panels(result, w))?;
    emit("prevalence_curves.csv", &|w| write_curves(result, w))?;
    emit("hist_full.csv", &|w| match &result.full_histogram {
        Some(h) => h.write_csv(w),
        None => write_line(w, "bin_left_km,bin_right_km,mass"),
    })?;
    for th in &result.transit_histograms {
        let name = format!("hist_{}_k{}_theta{}.csv", th.band, th.k, th.theta);
        emit(&name, &|w| th.histogram.write_csv(w))?;
    }
    emit("skipped.csv", &|w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["band", "k", "theta", "reason"])?;
        for s in &result.skipped {
            c.write_record([s.band.clone(), s.k.to_string(), s.theta.to_string(), s.reason.clone()])?;
        }
        c.flush().map_err(|e| Error::io("skipped.csv", e))
    })?;
    emit("summary.json", &|w| {
        let summary = serde_json::json!({
            "config_hash": result.config_hash,
            "total_simulations": result.total_simulations,
            "paired_runs": result.paired_runs(),
            "cells": result.cells.len(),
            "skipped_cells": result.skipped.len(),
        });
        serde_json::to_writer_pretty(&mut *w, &summary)?;
        write_line(w, "")
    })?;
    emit("sweep_result.json", &|w| {
        serde_json::to_writer(&mut *w, result)?;
        write_line(w, "")
    })?;
    Ok(written)
}

/// Reads back a `sweep_result.json` written by [`export_results`].
pub fn read_sweep_result(path: impl AsRef<Path>) -> Result<SweepResult> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

fn write_line(w: &mut dyn Write, line: &str) -> Result<()> {
    writeln!(w, "{line}").map_err(|e| Error::io("<export>", e))
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

fn pct_label(pct: f64) -> String {
    format!("locations_timing_{pct}")
}

fn summary_fields(s: &StatSummary) -> [String; 4] {
    [fmt(s.mean), fmt(s.sd), s.n.to_string(), s.censored.to_string()]
}

fn write_cells(result: &SweepResult, w: &mut dyn Write) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    let mut header: Vec<String> =
        ["disease", "r0", "band", "k", "theta", "lambda", "runs"].iter().map(|s| s.to_string()).collect();
    let stat_names = STATISTICS
        .iter()
        .map(|s| s.to_string())
        .chain(result.location_thresholds_pct.iter().map(|&p| pct_label(p)));
    for name in stat_names {
        for suffix in ["mean", "sd", "n", "censored"] {
            header.push(format!("{name}_{suffix}"));
        }
    }
    c.write_record(&header)?;
    for cell in &result.cells {
        let mut row = vec![
            cell.disease.clone(),
            fmt(cell.r0),
            cell.band.clone(),
            cell.k.to_string(),
            cell.theta.to_string(),
            fmt(cell.lambda),
            cell.runs.to_string(),
        ];
        for s in [&cell.early_warning, &cell.peak_timing, &cell.peak_magnitude, &cell.situational_awareness] {
            row.extend(summary_fields(s));
        }
        for &pct in &result.location_thresholds_pct {
            let s = cell
                .locations_timing
                .iter()
                .find(|(p, _)| *p == pct)
                .map(|(_, s)| *s)
                .unwrap_or(StatSummary { n: 0, mean: f64::NAN, sd: f64::NAN, censored: 0 });
            row.extend(summary_fields(&s));
        }
        c.write_record(&row)?;
    }
    c.flush().map_err(|e| Error::io("cells.csv", e))
}

/// Long-format table pooling every run of a (disease, band) group.
fn write_panels(result: &SweepResult, w: &mut dyn Write) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["disease", "r0", "band", "statistic", "mean", "sd", "n"])?;
    let r0_of: BTreeMap<&str, f64> = result.cells.iter().map(|c| (c.disease.as_str(), c.r0)).collect();
    let mut groups: BTreeMap<(usize, usize), (&str, &str, BTreeMap<String, Vec<f64>>)> = BTreeMap::new();
    for e in &result.ledger {
        let g = groups
            .entry((e.disease_index, e.band_index))
            .or_insert_with(|| (e.disease.as_str(), e.band.as_str(), BTreeMap::new()));
        let r = &e.report;
        let mut push = |name: String, v: Option<f64>| {
            let values = g.2.entry(name).or_default();
            if let Some(v) = v.filter(|v| v.is_finite()) {
                values.push(v);
            }
        };
        push("early_warning".into(), r.early_warning.map(|v| v as f64));
        push("peak_timing".into(), Some(r.peak_timing as f64));
        push("peak_magnitude".into(), Some(r.peak_magnitude));
        push("situational_awareness".into(), Some(r.situational_awareness));
        for &pct in &result.location_thresholds_pct {
            push(pct_label(pct), r.location_lag(pct).map(|v| v as f64));
        }
    }
    for (disease, band, stats) in groups.values() {
        let r0 = r0_of.get(disease).copied().unwrap_or(f64::NAN);
        for (name, values) in stats {
            let (m, sd) = mean_sd(values);
            c.write_record([
                disease.to_string(),
                fmt(r0),
                band.to_string(),
                name.clone(),
                fmt(m),
                fmt(sd),
                values.len().to_string(),
            ])?;
        }
    }
    c.flush().map_err(|e| Error::io("r0_panels.csv", e))
}

fn write_curves(result: &SweepResult, w: &mut dyn Write) -> Result<()> {
    let mut c = csv::Writer::from_writer(w);
    c.write_record(["disease", "band", "k", "theta", "day", "prevalence_mpt", "prevalence_ptt"])?;
    for curve in &result.sample_curves {
        let days = curve.prevalence_mpt.len().max(curve.prevalence_ptt.len());
        for day in 0..days {
            let cell = |s: &[f64]| s.get(day).map(|v| fmt(*v)).unwrap_or_default();
            c.write_record([
                curve.disease.clone(),
                curve.band.clone(),
                curve.k.to_string(),
                curve.theta.to_string(),
                day.to_string(),
                cell(&curve.prevalence_mpt),
                cell(&curve.prevalence_ptt),
            ])?;
        }
    }
    c.flush().map_err(|e| Error::io("prevalence_curves.csv", e))
}

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aggregate trajectory of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceSeries {
    /// `Σ_j I_j / Σ_j N_j` per day, starting at day zero.
    pub prevalence: Vec<f64>,
    /// Fraction of locations with an onset on or before each day.
    pub frac_locations_infected: Vec<f64>,
    /// Population totals per day. Empty for series built from curves only.
    pub total_s: Vec<f64>,
    pub total_i: Vec<f64>,
    pub total_r: Vec<f64>,
    /// Share of the population ever infected by the last day.
    pub final_size: f64,
    pub seed_location: usize,
    pub rng_seed: u64,
}

impl PrevalenceSeries {
    pub(crate) fn empty(seed_location: usize, rng_seed: u64) -> Self {
        Self {
            prevalence: Vec::new(),
            frac_locations_infected: Vec::new(),
            total_s: Vec::new(),
            total_i: Vec::new(),
            total_r: Vec::new(),
            final_size: 0.0,
            seed_location,
            rng_seed,
        }
    }

    pub(crate) fn push_day(&mut self, s: f64, i: f64, r: f64, frac_locations: f64) {
        let n = s + i + r;
        self.prevalence.push(if n > 0.0 { (i / n).clamp(0.0, 1.0) } else { 0.0 });
        self.frac_locations_infected.push(frac_locations);
        self.total_s.push(s);
        self.total_i.push(i);
        self.total_r.push(r);
    }

    /// A series holding only the two curves the comparison metrics use.
    pub fn from_curves(prevalence: Vec<f64>, frac_locations_infected: Vec<f64>) -> Result<Self> {
        if prevalence.len() != frac_locations_infected.len() {
            return Err(Error::invalid("prevalence and location curves differ in length"));
        }
        Ok(Self {
            prevalence,
            frac_locations_infected,
            total_s: Vec::new(),
            total_i: Vec::new(),
            total_r: Vec::new(),
            final_size: 0.0,
            seed_location: 0,
            rng_seed: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.prevalence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prevalence.is_empty()
    }

    /// CSV with header `day,prevalence,frac_locations_infected,total_S,total_I,total_R`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["day", "prevalence", "frac_locations_infected", "total_S", "total_I", "total_R"])?;
        let opt = |v: &Vec<f64>, t: usize| v.get(t).map(|x| x.to_string()).unwrap_or_default();
        for t in 0..self.len() {
            w.write_record([
                t.to_string(),
                self.prevalence[t].to_string(),
                self.frac_locations_infected[t].to_string(),
                opt(&self.total_s, t),
                opt(&self.total_i, t),
                opt(&self.total_r, t),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<series>", e))?;
        Ok(())
    }

    /// Reads the format written by [`PrevalenceSeries::write_csv`]. Run
    /// metadata is not part of the file and is left at zero.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut out = Self::from_curves(Vec::new(), Vec::new())?;
        for (row, record) in r.records().enumerate() {
            let record = record?;
            let num = |i: usize| -> Result<Option<f64>> {
                match record.get(i).map(str::trim) {
                    None | Some("") => Ok(None),
                    Some(raw) => raw.parse().map(Some).map_err(|_| Error::Row {
                        file: "<series>".into(),
                        row: row + 2,
                        message: format!("{raw:?} is not a number"),
                    }),
                }
            };
            let missing = |name: &str| Error::Row {
                file: "<series>".into(),
                row: row + 2,
                message: format!("missing {name}"),
            };
            out.prevalence.push(num(1)?.ok_or_else(|| missing("prevalence"))?);
            out.frac_locations_infected
                .push(num(2)?.ok_or_else(|| missing("frac_locations_infected"))?);
            for (i, col) in [(3, &mut out.total_s), (4, &mut out.total_i), (5, &mut out.total_r)] {
                if let Some(v) = num(i)? {
                    col.push(v);
                }
            }
        }
        Ok(out)
    }
}

use std::collections::HashMap;
use std::fs::File;
use std::path::Path;

use serde::Serialize;

use super::{Location, LocationTable, TripRecord};
use crate::error::{Error, Result};

/// Summary of a trip-file ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub locations: usize,
    pub trip_rows: usize,
    pub duplicate_rows_merged: usize,
    pub records: usize,
    pub total_trips: u64,
}

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn check_header(reader: &mut csv::Reader<File>, file: &str, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Row {
            file: file.to_string(),
            row: 1,
            message: format!("expected header {:?}, found {:?}", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    Ok(())
}

fn row_error(file: &str, record: &csv::StringRecord, message: impl Into<String>) -> Error {
    Error::Row {
        file: file.to_string(),
        row: record.position().map_or(0, |p| p.line() as usize),
        message: message.into(),
    }
}

fn field<'r>(file: &str, record: &'r csv::StringRecord, i: usize, name: &str) -> Result<&'r str> {
    record.get(i).ok_or_else(|| row_error(file, record, format!("missing column {name}")))
}

/// Reads a `id,lat,lon` CSV.
pub fn load_locations(path: impl AsRef<Path>) -> Result<LocationTable> {
    let path = path.as_ref();
    let file = path.display().to_string();
    let mut reader = open(path)?;
    check_header(&mut reader, &file, &["id", "lat", "lon"])?;

    let mut table = LocationTable::new();
    for record in reader.records() {
        let record = record?;
        let id = field(&file, &record, 0, "id")?;
        let parse = |i, name| -> Result<f64> {
            let raw = field(&file, &record, i, name)?;
            raw.parse::<f64>()
                .map_err(|_| row_error(&file, &record, format!("{name} {raw:?} is not a number")))
        };
        let (lat, lon) = (parse(1, "lat")?, parse(2, "lon")?);
        let location = Location::new(id, lat, lon).map_err(|e| row_error(&file, &record, e.to_string()))?;
        table.push(location).map_err(|e| row_error(&file, &record, e.to_string()))?;
    }
    Ok(table)
}

/// Parsed trips plus the location table they refer to.
#[derive(Debug, Clone)]
pub struct TripData {
    pub locations: LocationTable,
    pub trips: Vec<TripRecord>,
    pub report: IngestReport,
}

/// Reads the locations and trips files, validating every row.
///
/// Rows sharing `(origin, destination, hour)` are merged by summing counts,
/// so ingesting sharded files is idempotent with respect to the aggregate.
pub fn load_trips(trip_file: impl AsRef<Path>, locations_file: impl AsRef<Path>) -> Result<TripData> {
    let locations = load_locations(locations_file)?;
    let path = trip_file.as_ref();
    let file = path.display().to_string();
    let mut reader = open(path)?;
    check_header(&mut reader, &file, &["origin", "destination", "hour", "count"])?;

    let mut raw = Vec::new();
    for record in reader.records() {
        let record = record?;
        let resolve = |i, name| -> Result<usize> {
            let id = field(&file, &record, i, name)?;
            locations
                .index_of(id)
                .ok_or_else(|| row_error(&file, &record, format!("unknown {name} location {id:?}")))
        };
        let origin = resolve(0, "origin")?;
        let destination = resolve(1, "destination")?;

        let hour_raw = field(&file, &record, 2, "hour")?;
        let hour: i64 = hour_raw
            .parse()
            .map_err(|_| row_error(&file, &record, format!("hour {hour_raw:?} is not an integer")))?;
        if !(0..=23).contains(&hour) {
            return Err(row_error(&file, &record, format!("hour {hour} outside 0-23")));
        }

        let count_raw = field(&file, &record, 3, "count")?;
        let count: i64 = count_raw
            .parse()
            .map_err(|_| row_error(&file, &record, format!("count {count_raw:?} is not an integer")))?;
        if count < 1 {
            return Err(row_error(&file, &record, format!("count {count} is not positive")));
        }

        raw.push(TripRecord {
            origin,
            destination,
            hour: hour as u8,
            count: count as u64,
        });
    }

    let trip_rows = raw.len();
    let trips = merge_duplicate_trips(raw);
    let report = IngestReport {
        locations: locations.len(),
        trip_rows,
        duplicate_rows_merged: trip_rows - trips.len(),
        records: trips.len(),
        total_trips: trips.iter().map(|t| t.count).sum(),
    };
    log::info!(
        "ingested {} trip rows into {} records over {} locations",
        report.trip_rows,
        report.records,
        report.locations
    );
    Ok(TripData {
        locations,
        trips,
        report,
    })
}

/// Sums counts of records sharing `(origin, destination, hour)`, keeping
/// first-appearance order.
pub fn merge_duplicate_trips(trips: impl IntoIterator<Item = TripRecord>) -> Vec<TripRecord> {
    let mut out: Vec<TripRecord> = Vec::new();
    let mut seen: HashMap<(usize, usize, u8), usize> = HashMap::new();
    for trip in trips {
        match seen.get(&(trip.origin, trip.destination, trip.hour)) {
            Some(&pos) => out[pos].count += trip.count,
            None => {
                seen.insert((trip.origin, trip.destination, trip.hour), out.len());
                out.push(trip);
            }
        }
    }
    out
}

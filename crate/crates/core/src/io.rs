//! Canonical long CSV (`series_id,timestamp,value`) and its JSON sidecar.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{Dataset, DatasetMeta, TimeAxis, TimeGrid, Unit, DEFAULT_DOMAIN_MAX};
use crate::degrade::check_domain_fits;
use crate::error::{Error, Result};
use crate::scalar::Measure;

pub const HEADER: [&str; 3] = ["series_id", "timestamp", "value"];

/// Optional metadata stored next to a CSV file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    #[serde(default)]
    pub unit: Unit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_seconds: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_axis: Option<TimeAxis>,
}

impl Sidecar {
    pub fn from_meta(meta: &DatasetMeta) -> Self {
        Self {
            unit: meta.unit,
            step_seconds: Some(meta.step_seconds),
            domain_max: Some(meta.domain_max),
            time_axis: Some(meta.time_axis),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| io_error(path, source))?;
        serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::Config(format!("invalid sidecar {}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| io_error(path, source))?;
        let mut w = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)
            .map_err(|e| Error::Config(format!("cannot write sidecar: {e}")))?;
        w.write_all(b"\n")
            .and_then(|_| w.flush())
            .map_err(|source| io_error(path, source))
    }
}

/// Where the sidecar of `csv` lives: `data.csv` -> `data.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Explicit sidecar; otherwise [`sidecar_path`] is used when it exists.
    pub sidecar: Option<PathBuf>,
    /// Overrides the sidecar's `domain_max`.
    pub domain_max: Option<u64>,
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn load_long_csv<M: Measure>(path: &Path, options: &LoadOptions) -> Result<Dataset<M>> {
    let sidecar_file = options
        .sidecar
        .clone()
        .or_else(|| Some(sidecar_path(path)).filter(|p| p.exists()));
    let mut sidecar = match sidecar_file {
        Some(p) => Sidecar::read(&p)?,
        None => Sidecar::default(),
    };
    if options.domain_max.is_some() {
        sidecar.domain_max = options.domain_max;
    }
    let file = File::open(path).map_err(|source| io_error(path, source))?;
    read_long_csv(BufReader::with_capacity(1 << 20, file), &sidecar)
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_uint(field: &[u8], what: &str, line: u64) -> Result<u64> {
    let text = std::str::from_utf8(field).map_err(|_| parse_err(line, "field is not UTF-8"))?;
    let text = text.trim();
    if text.starts_with('-') {
        return Err(parse_err(line, format!("negative {what} `{text}`")));
    }
    text.parse::<u64>()
        .map_err(|_| parse_err(line, format!("{what} `{text}` is not a non-negative integer")))
}

/// Parses canonical long CSV. Rows may come in any order; absent
/// `(series_id, timestamp)` pairs and empty values are missing cells.
pub fn read_long_csv<M: Measure, R: Read>(reader: R, sidecar: &Sidecar) -> Result<Dataset<M>> {
    let domain_max = sidecar.domain_max.unwrap_or(DEFAULT_DOMAIN_MAX);
    check_domain_fits::<M>(domain_max)?;

    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = csv
        .byte_headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if header.len() != 3 || header.iter().zip(HEADER).any(|(h, want)| h != want.as_bytes()) {
        return Err(parse_err(1, "header must be `series_id,timestamp,value`"));
    }

    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut cells: Vec<(u32, u64, Option<M>, u64)> = Vec::new();
    let mut record = csv::ByteRecord::new();
    loop {
        let more = csv.read_byte_record(&mut record).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        let id = std::str::from_utf8(&record[0])
            .map_err(|_| parse_err(line, "series_id is not UTF-8"))?;
        if id.is_empty() {
            return Err(parse_err(line, "empty series_id"));
        }
        let timestamp = parse_uint(&record[1], "timestamp", line)?;
        let value = if record[2].iter().all(|b| b.is_ascii_whitespace()) {
            None
        } else {
            let v = parse_uint(&record[2], "value", line)?;
            if v > domain_max {
                return Err(parse_err(
                    line,
                    format!("value {v} exceeds domain_max {domain_max}"),
                ));
            }
            Some(M::narrow(v).expect("domain fits the measure type"))
        };
        let next = ids.len() as u32;
        let series = match ids.get(id) {
            Some(&s) => s,
            None => {
                ids.insert(id.to_string(), next);
                next
            }
        };
        cells.push((series, timestamp, value, line));
    }
    if cells.is_empty() {
        return Err(Error::Invalid("no data rows".into()));
    }

    let mut stamps: Vec<u64> = cells.iter().map(|c| c.1).collect();
    stamps.sort_unstable();
    stamps.dedup();
    let spacing = match stamps.len() {
        1 => None,
        _ => {
            let step = stamps[1] - stamps[0];
            if let Some(w) = stamps.windows(2).find(|w| w[1] - w[0] != step) {
                return Err(Error::Grid(format!(
                    "spacing {} between {} and {} differs from {step}",
                    w[1] - w[0],
                    w[0],
                    w[1]
                )));
            }
            Some(step)
        }
    };
    let time_axis = sidecar.time_axis.unwrap_or(match spacing {
        Some(1) | None => TimeAxis::Index,
        Some(_) => TimeAxis::Epoch,
    });
    let step_seconds = match (sidecar.step_seconds, spacing, time_axis) {
        (Some(s), Some(sp), TimeAxis::Epoch) if s != sp => {
            return Err(Error::Grid(format!(
                "timestamps are spaced by {sp} s but step_seconds is {s}"
            )))
        }
        (Some(s), _, _) => s,
        (None, Some(sp), _) => sp,
        (None, None, _) => 1,
    };
    let grid_step = spacing.unwrap_or(match time_axis {
        TimeAxis::Epoch => step_seconds,
        TimeAxis::Index => 1,
    });
    let grid = TimeGrid::new(stamps[0], grid_step, stamps.len())?;
    let m = grid.len;

    let mut names: Vec<(String, u32)> = ids.into_iter().collect();
    names.sort_unstable();
    let mut row_of = vec![0usize; names.len()];
    for (row, (_, series)) in names.iter().enumerate() {
        row_of[*series as usize] = row;
    }
    let mut rows: Vec<Vec<Option<M>>> = vec![vec![None; m]; names.len()];
    let mut seen = vec![false; names.len() * m];
    for (series, timestamp, value, line) in cells {
        let row = row_of[series as usize];
        let t = grid.index_of(timestamp).expect("timestamp lies on inferred grid");
        let slot = row * m + t;
        if seen[slot] {
            return Err(Error::Duplicate {
                series_id: names[row].0.clone(),
                timestamp,
                line,
            });
        }
        seen[slot] = true;
        rows[row][t] = value;
    }
    drop(seen);

    let meta = DatasetMeta {
        unit: sidecar.unit,
        step_seconds,
        domain_max,
        time_axis,
    };
    let mut builder = crate::dataset::DatasetBuilder::new(meta, grid, names.len())?;
    for ((id, _), row) in names.into_iter().zip(rows) {
        builder.push_row(id, row)?;
    }
    builder.finish()
}

/// Writes every cell in canonical order: series by id, then timestamps.
/// Missing cells are written with an empty value.
pub fn write_long_csv_to<M: Measure, W: Write>(dataset: &Dataset<M>, mut out: W) -> std::io::Result<()> {
    out.write_all(b"series_id,timestamp,value\n")?;
    for (row, id) in dataset.series_ids().iter().enumerate() {
        for t in 0..dataset.m() {
            match dataset.value(row, t) {
                Some(v) => writeln!(out, "{id},{},{v}", dataset.timestamp(t))?,
                None => writeln!(out, "{id},{},", dataset.timestamp(t))?,
            }
        }
    }
    out.flush()
}

/// Writes `path` and its sidecar.
pub fn write_long_csv<M: Measure>(dataset: &Dataset<M>, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| io_error(path, source))?;
    write_long_csv_to(dataset, BufWriter::with_capacity(1 << 20, file))
        .map_err(|source| io_error(path, source))?;
    Sidecar::from_meta(dataset.meta()).write(&sidecar_path(path))
}

/// SHA-256 (hex) of the canonical CSV serialization followed by the
/// canonical sidecar JSON.
pub fn content_hash<M: Measure>(dataset: &Dataset<M>) -> String {
    let mut hasher = Sha256::new();
    write_long_csv_to(dataset, BufWriter::with_capacity(1 << 16, &mut hasher))
        .expect("hashing never fails");
    let sidecar = serde_json::to_vec(&Sidecar::from_meta(dataset.meta()))
        .expect("sidecar serializes");
    hasher.update(&sidecar);
    hex::encode(hasher.finalize())
}

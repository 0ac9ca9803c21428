//! Population summaries, temporal grouping and correlation.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, Datelike, Timelike};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, TimeAxis};
use crate::error::{Error, Result};
use crate::scalar::{Measure, Real};

/// Sample Pearson correlation coefficient.
pub fn pearson<F: Real>(x: &[F], y: &[F]) -> Result<F> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "pearson inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Shape("pearson needs at least two points".into()));
    }
    let n = F::of_f64(x.len() as f64);
    let mean_x = x.iter().copied().sum::<F>() / n;
    let mean_y = y.iter().copied().sum::<F>() / n;
    let (mut sxy, mut sxx, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == F::zero() || syy == F::zero() {
        return Err(Error::Degenerate("pearson input has zero variance".into()));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-F::one()).min(F::one()))
}

/// Per-timestamp scalar series, e.g. temperature or mean consumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxSeries<F> {
    pub label: String,
    pub timestamps: Vec<u64>,
    /// `None` marks an undefined point.
    pub values: Vec<Option<F>>,
}

impl<F: Real> AuxSeries<F> {
    pub fn new(label: impl Into<String>, timestamps: Vec<u64>, values: Vec<Option<F>>) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} timestamps for {} values",
                timestamps.len(),
                values.len()
            )));
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("aux timestamps must be strictly increasing".into()));
        }
        Ok(Self {
            label: label.into(),
            timestamps,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Reads a `timestamp,value` CSV with a header. Empty values are undefined.
    pub fn read_csv<R: std::io::Read>(label: impl Into<String>, reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = csv.headers().map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        if header.iter().map(str::trim).ne(["timestamp", "value"]) {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `timestamp,value`".into(),
            });
        }
        let mut timestamps = Vec::new();
        let mut values = Vec::new();
        for record in csv.records() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let bad = |what: &str| Error::Parse {
                line,
                message: format!("invalid {what}"),
            };
            if record.len() != 2 {
                return Err(bad("row: expected `timestamp,value`"));
            }
            let ts: u64 = record[0].trim().parse().map_err(|_| bad("timestamp"))?;
            let raw = record[1].trim();
            let value = if raw.is_empty() {
                None
            } else {
                let v: f64 = raw.parse().map_err(|_| bad("value"))?;
                Some(F::of_f64(v))
            };
            timestamps.push(ts);
            values.push(value);
        }
        Self::new(label, timestamps, values)
    }
}

/// Mean over present measures at every timestamp; `None` where all are missing.
pub fn population_mean_series<M: Measure, F: Real>(dataset: &Dataset<M>) -> AuxSeries<F> {
    let values = (0..dataset.m())
        .map(|t| {
            let (vals, present) = dataset.column(t);
            let mut sum: u128 = 0;
            let mut count: u64 = 0;
            for (&v, &p) in vals.iter().zip(present) {
                if p {
                    sum += v.widen() as u128;
                    count += 1;
                }
            }
            (count > 0).then(|| F::of_u128(sum) / F::of_u128(count as u128))
        })
        .collect();
    AuxSeries {
        label: "mean_consumption".into(),
        timestamps: dataset.timestamps(),
        values,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary<F> {
    pub mean: F,
    /// Population standard deviation.
    pub std: F,
    pub zero_fraction: F,
    pub missing_fraction: F,
    pub present_count: u64,
}

/// Mean, population standard deviation and zero share over present
/// measures, plus the share of missing cells. Sums are exact integers.
pub fn summary<M: Measure, F: Real>(dataset: &Dataset<M>) -> Result<Summary<F>> {
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    let mut count: u128 = 0;
    let mut zeros: u128 = 0;
    for t in 0..dataset.m() {
        let (vals, present) = dataset.column(t);
        for (&v, &p) in vals.iter().zip(present) {
            if p {
                let v = v.widen() as u128;
                sum += v;
                sum_sq += v * v;
                count += 1;
                zeros += (v == 0) as u128;
            }
        }
    }
    if count == 0 {
        return Err(Error::Degenerate("dataset has no present measure".into()));
    }
    let cells = (dataset.n() * dataset.m()) as u128;
    // N^2 * variance, exact
    let scaled_var = sum_sq * count - sum * sum;
    let n = F::of_u128(count);
    Ok(Summary {
        mean: F::of_u128(sum) / n,
        std: (F::of_u128(scaled_var)).sqrt() / n,
        zero_fraction: F::of_u128(zeros) / n,
        missing_fraction: F::of_u128(cells - count) / F::of_u128(cells),
        present_count: count as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Month,
    HourOfDay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKey {
    Month { year: i32, month: u32 },
    Hour(u32),
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKey::Month { year, month } => write!(f, "{year:04}-{month:02}"),
            GroupKey::Hour(h) => write!(f, "{h:02}"),
        }
    }
}

impl Serialize for GroupKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Maps dataset timestamps to wall-clock time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeMapping {
    pub axis: TimeAxis,
    /// Epoch seconds of index 0, required for [`TimeAxis::Index`].
    pub index_origin: Option<i64>,
    /// Seconds per index unit.
    pub seconds_per_index: u64,
    /// Fixed offset from UTC applied before extracting calendar fields.
    pub utc_offset_seconds: i32,
}

impl TimeMapping {
    pub fn epoch() -> Self {
        Self {
            axis: TimeAxis::Epoch,
            index_origin: None,
            seconds_per_index: 1,
            utc_offset_seconds: 0,
        }
    }

    pub fn for_dataset<M>(dataset: &Dataset<M>) -> Self {
        Self {
            axis: dataset.meta().time_axis,
            index_origin: None,
            seconds_per_index: dataset.meta().step_seconds,
            utc_offset_seconds: 0,
        }
    }

    /// Local epoch seconds of `timestamp`.
    pub fn local_seconds(&self, timestamp: u64) -> Result<i64> {
        let base = match self.axis {
            TimeAxis::Epoch => timestamp as i64,
            TimeAxis::Index => {
                let origin = self.index_origin.ok_or_else(|| {
                    Error::Config("index timestamps need an epoch origin for calendar grouping".into())
                })?;
                origin + (timestamp * self.seconds_per_index) as i64
            }
        };
        Ok(base + self.utc_offset_seconds as i64)
    }

    pub fn key(&self, timestamp: u64, granularity: Granularity) -> Result<GroupKey> {
        let secs = self.local_seconds(timestamp)?;
        let when = DateTime::from_timestamp(secs, 0)
            .ok_or_else(|| Error::Config(format!("timestamp {secs} out of calendar range")))?;
        Ok(match granularity {
            Granularity::Month => GroupKey::Month {
                year: when.year(),
                month: when.month(),
            },
            Granularity::HourOfDay => GroupKey::Hour(when.hour()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group<F> {
    pub key: GroupKey,
    pub mean: F,
    pub min: F,
    pub max: F,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupedSeries<F> {
    pub granularity: Granularity,
    pub groups: Vec<Group<F>>,
}

/// Mean, min, max and count per calendar month or hour of day. Groups come
/// out in key order.
pub fn group_by_time<F: Real>(
    points: &[(u64, F)],
    granularity: Granularity,
    mapping: &TimeMapping,
) -> Result<GroupedSeries<F>> {
    let mut acc: BTreeMap<GroupKey, (F, F, F, usize)> = BTreeMap::new();
    for &(ts, v) in points {
        let key = mapping.key(ts, granularity)?;
        let entry = acc.entry(key).or_insert((F::zero(), v, v, 0));
        entry.0 = entry.0 + v;
        entry.1 = entry.1.min(v);
        entry.2 = entry.2.max(v);
        entry.3 += 1;
    }
    let groups = acc
        .into_iter()
        .map(|(key, (sum, min, max, count))| Group {
            key,
            mean: sum / F::of_f64(count as f64),
            min,
            max,
            count,
        })
        .collect();
    Ok(GroupedSeries {
        granularity,
        groups,
    })
}

/// Paired values: `x` from the per-timestamp points, `y` from the aux series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aligned<F> {
    pub timestamps: Vec<u64>,
    pub x: Vec<F>,
    pub y: Vec<F>,
}

/// Pairs each point with the aux value whose interval contains it. Aux
/// interval `i` spans `[ts_i, ts_{i+1})`; the last one spans one aux step
/// (or only its own timestamp when the aux has a single point). Points
/// outside every interval, and undefined values, are dropped.
pub fn align<F: Real>(aux: &AuxSeries<F>, points: &[(u64, Option<F>)]) -> Result<Aligned<F>> {
    if aux.is_empty() || points.is_empty() {
        return Err(Error::Alignment("empty series".into()));
    }
    let ts = &aux.timestamps;
    let last_span = if ts.len() > 1 {
        ts[ts.len() - 1] - ts[ts.len() - 2]
    } else {
        1
    };
    let end = ts[ts.len() - 1] + last_span;
    let mut out = Aligned {
        timestamps: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
    };
    let mut overlap = false;
    for &(p, x) in points {
        if p < ts[0] || p >= end {
            continue;
        }
        overlap = true;
        let idx = ts.partition_point(|&a| a <= p) - 1;
        if let (Some(x), Some(y)) = (x, aux.values[idx]) {
            out.timestamps.push(p);
            out.x.push(x);
            out.y.push(y);
        }
    }
    if !overlap {
        return Err(Error::Alignment(format!(
            "aux `{}` covers [{}, {}) which contains none of the points",
            aux.label, ts[0], end
        )));
    }
    Ok(out)
}

//! Dense, immutable series-by-timestamp matrix with an explicit presence mask.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::degrade::check_domain_fits;
use crate::error::{Error, Result};
use crate::scalar::Measure;

/// Default maximum admissible measure (W).
pub const DEFAULT_DOMAIN_MAX: u64 = 36_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Unit {
    #[default]
    W,
    Wh,
}

impl std::fmt::Display for Unit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Unit::W => f.write_str("W"),
            Unit::Wh => f.write_str("Wh"),
        }
    }
}

/// How timestamps relate to wall-clock time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeAxis {
    /// Timestamps are Unix epoch seconds.
    Epoch,
    /// Timestamps are plain integer positions.
    Index,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub unit: Unit,
    /// Seconds between two consecutive timestamps.
    pub step_seconds: u64,
    pub domain_max: u64,
    pub time_axis: TimeAxis,
}

impl Default for DatasetMeta {
    fn default() -> Self {
        Self {
            unit: Unit::W,
            step_seconds: 1800,
            domain_max: DEFAULT_DOMAIN_MAX,
            time_axis: TimeAxis::Epoch,
        }
    }
}

/// Regular timestamp grid `start, start + step, ...` of `len` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: u64,
    pub step: u64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(start: u64, step: u64, len: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::Grid("timestamp spacing must be positive".into()));
        }
        if len == 0 {
            return Err(Error::Invalid("at least one timestamp is required".into()));
        }
        let last = (len as u64 - 1)
            .checked_mul(step)
            .and_then(|span| span.checked_add(start));
        if last.is_none() {
            return Err(Error::Grid("timestamp grid overflows u64".into()));
        }
        Ok(Self { start, step, len })
    }

    #[inline]
    pub fn at(&self, index: usize) -> u64 {
        self.start + index as u64 * self.step
    }

    /// Position of `timestamp` on the grid, if it lies on it.
    pub fn index_of(&self, timestamp: u64) -> Option<usize> {
        if timestamp < self.start {
            return None;
        }
        let offset = timestamp - self.start;
        if !offset.is_multiple_of(self.step) {
            return None;
        }
        let index = (offset / self.step) as usize;
        (index < self.len).then_some(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.at(i))
    }
}

/// `k` consecutive timestamps starting at index `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowSpec {
    pub t: usize,
    pub k: usize,
}

impl WindowSpec {
    pub fn new(t: usize, k: usize) -> Self {
        Self { t, k }
    }

    /// Fails unless `k >= 1` and the window fits in `m` timestamps.
    pub fn check(&self, m: usize) -> Result<()> {
        if self.k == 0 || self.t.checked_add(self.k).is_none_or(|end| end > m) {
            return Err(Error::Bounds {
                t: self.t,
                k: self.k,
                m,
            });
        }
        Ok(())
    }
}

/// Complete-in-window rows of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSet<'a, M> {
    pub spec: WindowSpec,
    pub rows: Vec<(&'a str, Vec<M>)>,
    pub excluded_count: usize,
}

/// Population of `n` series over a regular grid of `m` timestamps.
///
/// Storage is timestamp-major: the `n` measures of timestamp `t` are
/// contiguous, which is the access pattern of every window scan. Rows are
/// kept in lexicographic order of their identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset<M> {
    series_ids: Vec<String>,
    grid: TimeGrid,
    meta: DatasetMeta,
    values: Vec<M>,
    present: Vec<bool>,
}

impl<M: Measure> Dataset<M> {
    /// Builds a dataset from rows given in any order.
    pub fn from_rows(
        meta: DatasetMeta,
        grid: TimeGrid,
        mut rows: Vec<(String, Vec<Option<M>>)>,
    ) -> Result<Self> {
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let mut builder = DatasetBuilder::new(meta, grid, rows.len())?;
        for (id, values) in rows {
            builder.push_row(id, values)?;
        }
        builder.finish()
    }
}

impl<M> Dataset<M> {
    pub fn n(&self) -> usize {
        self.series_ids.len()
    }

    pub fn m(&self) -> usize {
        self.grid.len
    }

    pub fn series_ids(&self) -> &[String] {
        &self.series_ids
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn meta(&self) -> &DatasetMeta {
        &self.meta
    }

    pub fn timestamp(&self, t: usize) -> u64 {
        self.grid.at(t)
    }

    pub fn timestamps(&self) -> Vec<u64> {
        self.grid.iter().collect()
    }

    pub fn row_index(&self, series_id: &str) -> Option<usize> {
        self.series_ids
            .binary_search_by(|probe| probe.as_str().cmp(series_id))
            .ok()
    }

    pub fn missing_count(&self) -> usize {
        self.present.iter().filter(|p| !**p).count()
    }
}

impl<M: Measure> Dataset<M> {
    /// Measure of series `row` at timestamp index `t`.
    #[inline]
    pub fn value(&self, row: usize, t: usize) -> Option<M> {
        let idx = t * self.n() + row;
        self.present[idx].then(|| self.values[idx])
    }

    /// Raw measures and presence flags of timestamp `t`, one entry per row.
    /// Values of absent cells are zero and must be ignored.
    #[inline]
    pub fn column(&self, t: usize) -> (&[M], &[bool]) {
        let n = self.n();
        let range = t * n..(t + 1) * n;
        (&self.values[range.clone()], &self.present[range])
    }

    pub fn row(&self, row: usize) -> Vec<Option<M>> {
        (0..self.m()).map(|t| self.value(row, t)).collect()
    }

    /// Rows with no missing measure inside `spec`, in canonical order.
    pub fn window(&self, spec: WindowSpec) -> Result<WindowSet<'_, M>> {
        spec.check(self.m())?;
        let mut rows = Vec::new();
        let mut excluded_count = 0;
        'rows: for row in 0..self.n() {
            let mut values = Vec::with_capacity(spec.k);
            for t in spec.t..spec.t + spec.k {
                match self.value(row, t) {
                    Some(v) => values.push(v),
                    None => {
                        excluded_count += 1;
                        continue 'rows;
                    }
                }
            }
            rows.push((self.series_ids[row].as_str(), values));
        }
        Ok(WindowSet {
            spec,
            rows,
            excluded_count,
        })
    }

    /// Restriction to the given series, kept in canonical order.
    pub fn subsample<S: AsRef<str>>(&self, ids: &[S]) -> Result<Self> {
        let mut rows = Vec::with_capacity(ids.len());
        for id in ids {
            let id = id.as_ref();
            let row = self
                .row_index(id)
                .ok_or_else(|| Error::UnknownSeries(id.to_string()))?;
            rows.push(row);
        }
        rows.sort_unstable();
        rows.dedup();
        Ok(self.select_rows(&rows))
    }

    /// Restriction to the given row indices, which must be sorted and distinct.
    pub(crate) fn select_rows(&self, rows: &[usize]) -> Self {
        let n = self.n();
        let mut values = Vec::with_capacity(rows.len() * self.m());
        let mut present = Vec::with_capacity(rows.len() * self.m());
        for t in 0..self.m() {
            let base = t * n;
            values.extend(rows.iter().map(|&r| self.values[base + r]));
            present.extend(rows.iter().map(|&r| self.present[base + r]));
        }
        Self {
            series_ids: rows.iter().map(|&r| self.series_ids[r].clone()).collect(),
            grid: self.grid,
            meta: self.meta,
            values,
            present,
        }
    }

    /// Applies `f` to every present measure, keeping the mask and metadata.
    pub(crate) fn map_present(&self, f: impl Fn(M) -> M + Sync) -> Self {
        use rayon::prelude::*;
        let n = self.n();
        let mut values = self.values.clone();
        values
            .par_chunks_mut(n)
            .zip(self.present.par_chunks(n))
            .for_each(|(vals, mask)| {
                for (v, &p) in vals.iter_mut().zip(mask) {
                    if p {
                        *v = f(*v);
                    }
                }
            });
        Self {
            series_ids: self.series_ids.clone(),
            grid: self.grid,
            meta: self.meta,
            values,
            present: self.present.clone(),
        }
    }
}

/// Incremental construction of a [`Dataset`] one row at a time.
///
/// Rows pushed in increasing identifier order are stored without any
/// reordering; otherwise they are sorted in [`DatasetBuilder::finish`].
pub struct DatasetBuilder<M> {
    meta: DatasetMeta,
    grid: TimeGrid,
    capacity: usize,
    ids: Vec<String>,
    // row-major while building
    values: Vec<M>,
    present: Vec<bool>,
}

impl<M: Measure> DatasetBuilder<M> {
    pub fn new(meta: DatasetMeta, grid: TimeGrid, capacity: usize) -> Result<Self> {
        if meta.step_seconds == 0 {
            return Err(Error::Invalid("step_seconds must be positive".into()));
        }
        check_domain_fits::<M>(meta.domain_max)?;
        Ok(Self {
            meta,
            grid,
            capacity,
            ids: Vec::with_capacity(capacity),
            values: Vec::with_capacity(capacity * grid.len),
            present: Vec::with_capacity(capacity * grid.len),
        })
    }

    pub fn push_row<I>(&mut self, id: String, row: I) -> Result<()>
    where
        I: IntoIterator<Item = Option<M>>,
    {
        if id.is_empty() {
            return Err(Error::Invalid("series ids must be non-empty".into()));
        }
        let domain_max = self.meta.domain_max;
        let before = self.values.len();
        for cell in row {
            match cell {
                Some(v) => {
                    if v.widen() > domain_max {
                        self.values.truncate(before);
                        self.present.truncate(before);
                        return Err(Error::Invalid(format!(
                            "series `{id}` has measure {v} above domain_max {domain_max}"
                        )));
                    }
                    self.values.push(v);
                    self.present.push(true);
                }
                None => {
                    self.values.push(M::zero());
                    self.present.push(false);
                }
            }
        }
        let pushed = self.values.len() - before;
        if pushed != self.grid.len {
            self.values.truncate(before);
            self.present.truncate(before);
            return Err(Error::Shape(format!(
                "series `{id}` has {pushed} cells, expected {}",
                self.grid.len
            )));
        }
        self.ids.push(id);
        Ok(())
    }

    pub fn finish(self) -> Result<Dataset<M>> {
        let n = self.ids.len();
        let m = self.grid.len;
        if n == 0 {
            return Err(Error::Invalid("at least one series is required".into()));
        }
        debug_assert!(n <= self.capacity.max(n));
        let mut order: Vec<usize> = (0..n).collect();
        let sorted = self.ids.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            order.sort_by(|&a, &b| self.ids[a].cmp(&self.ids[b]));
            let mut seen = HashSet::with_capacity(n);
            for id in &self.ids {
                if !seen.insert(id.as_str()) {
                    return Err(Error::Invalid(format!("duplicate series id `{id}`")));
                }
            }
        }
        let mut values = Vec::with_capacity(n * m);
        let mut present = Vec::with_capacity(n * m);
        for t in 0..m {
            values.extend(order.iter().map(|&r| self.values[r * m + t]));
            present.extend(order.iter().map(|&r| self.present[r * m + t]));
        }
        let mut ids = self.ids;
        if !sorted {
            let mut slots: Vec<Option<String>> = ids.into_iter().map(Some).collect();
            ids = order.iter().map(|&r| slots[r].take().unwrap()).collect();
        }
        Ok(Dataset {
            series_ids: ids,
            grid: self.grid,
            meta: self.meta,
            values,
            present,
        })
    }
}

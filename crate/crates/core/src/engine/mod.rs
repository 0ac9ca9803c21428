//! Per-timestamp uniqueness and entropy of k-length windows.
//!
//! All curve computations are parallel over window starts. Each worker owns
//! its scratch buffers and results are collected in start order, so outputs
//! do not depend on the number of threads.

mod kernel;
mod oracle;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, WindowSpec};
use crate::degrade::{round_order, Rounder, RoundingOrder};
use crate::error::{Error, Result};
use crate::scalar::Measure;

use kernel::{refine, Scratch, WindowCounts};
pub use oracle::brute_force_uniqueness;

/// Uniqueness of a single window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowUniqueness {
    pub spec: WindowSpec,
    pub order: RoundingOrder,
    /// `None` when no series is complete over the window.
    pub u: Option<f64>,
    pub unique_count: usize,
    pub included_count: usize,
    /// Series whose window is not shared, in canonical order.
    pub unique_ids: Vec<String>,
}

/// Shannon entropy (bits) of a single window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEntropy {
    pub spec: WindowSpec,
    pub order: RoundingOrder,
    pub e: Option<f64>,
    pub class_count: usize,
    pub included_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessPoint {
    pub t: usize,
    pub u: Option<f64>,
    pub unique_count: usize,
    pub included_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unique_ids: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessResult {
    pub k: usize,
    pub order: RoundingOrder,
    pub per_t: Vec<UniquenessPoint>,
    pub mean_u: Option<f64>,
    pub min_u: Option<f64>,
    pub max_u: Option<f64>,
    pub undefined_windows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyPoint {
    pub t: usize,
    pub e: Option<f64>,
    pub class_count: usize,
    pub included_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    pub k: usize,
    pub order: RoundingOrder,
    pub per_t: Vec<EntropyPoint>,
    pub mean_e: Option<f64>,
    pub min_e: Option<f64>,
    pub max_e: Option<f64>,
    pub undefined_windows: usize,
}

/// Both curves for one `(k, order)` pair of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub k: usize,
    pub order: RoundingOrder,
    pub uniqueness: UniquenessResult,
    pub entropy: EntropyResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub query: Vec<u64>,
    pub t: usize,
    pub order: RoundingOrder,
    pub matches: Vec<String>,
    pub is_unique: bool,
}

/// Options shared by curve and sweep computations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CurveOptions {
    /// Materialize the ids of unique series for every window.
    pub with_ids: bool,
    /// Restrict window starts to these indices. Starts where the window
    /// would not fit are skipped. `None` means every start.
    pub starts: Option<Vec<usize>>,
}

fn window_starts(m: usize, k: usize, opts: &CurveOptions) -> Vec<usize> {
    let last = m - k;
    match &opts.starts {
        None => (0..=last).collect(),
        Some(starts) => {
            let mut s: Vec<usize> = starts.iter().copied().filter(|&t| t <= last).collect();
            s.sort_unstable();
            s.dedup();
            s
        }
    }
}

fn check_k(m: usize, k: usize) -> Result<()> {
    WindowSpec::new(0, k).check(m)
}

fn ids_of<M>(dataset: &Dataset<M>, rows: &[usize]) -> Vec<String> {
    rows.iter()
        .map(|&r| dataset.series_ids()[r].clone())
        .collect::<Vec<_>>()
}

fn single_window<M: Measure>(
    dataset: &Dataset<M>,
    spec: WindowSpec,
    order: RoundingOrder,
    with_ids: bool,
) -> Result<(WindowCounts, Vec<usize>)> {
    spec.check(dataset.m())?;
    let mut scratch = Scratch::new(dataset.n());
    let mut out = None;
    refine(
        dataset,
        spec.t,
        spec.k,
        Rounder::new(order),
        &mut scratch,
        |k, counts, scratch| {
            if k == spec.k {
                let rows = if with_ids {
                    scratch.singleton_rows()
                } else {
                    Vec::new()
                };
                out = Some((*counts, rows));
            }
        },
    );
    Ok(out.expect("refinement visits the requested length"))
}

/// Uniqueness of the window `spec` after rounding at `order`.
pub fn uniqueness_at<M: Measure>(
    dataset: &Dataset<M>,
    spec: WindowSpec,
    order: RoundingOrder,
) -> Result<WindowUniqueness> {
    let (counts, rows) = single_window(dataset, spec, order, true)?;
    Ok(WindowUniqueness {
        spec,
        order,
        u: counts.uniqueness(),
        unique_count: counts.unique,
        included_count: counts.included,
        unique_ids: ids_of(dataset, &rows),
    })
}

/// Entropy of the window `spec` after rounding at `order`.
pub fn entropy_at<M: Measure>(
    dataset: &Dataset<M>,
    spec: WindowSpec,
    order: RoundingOrder,
) -> Result<WindowEntropy> {
    let (counts, _) = single_window(dataset, spec, order, false)?;
    Ok(WindowEntropy {
        spec,
        order,
        e: counts.entropy,
        class_count: counts.classes,
        included_count: counts.included,
    })
}

fn extrema(values: impl Iterator<Item = f64>) -> (Option<f64>, Option<f64>, Option<f64>, usize) {
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut min: Option<f64> = None;
    let mut max: Option<f64> = None;
    for v in values {
        sum += v;
        count += 1;
        min = Some(min.map_or(v, |m| m.min(v)));
        max = Some(max.map_or(v, |m| m.max(v)));
    }
    let mean = (count > 0).then(|| sum / count as f64);
    (mean, min, max, count)
}

type WindowOutput = (usize, WindowCounts, Option<Vec<usize>>);
/// Counts and optional singleton rows of one window, before its start is attached.
type Found = Option<(WindowCounts, Option<Vec<usize>>)>;

fn assemble<M: Measure>(
    dataset: &Dataset<M>,
    k: usize,
    order: RoundingOrder,
    windows: Vec<WindowOutput>,
) -> (UniquenessResult, EntropyResult) {
    let (mean_u, min_u, max_u, defined) = extrema(windows.iter().filter_map(|w| w.1.uniqueness()));
    let (mean_e, min_e, max_e, _) = extrema(windows.iter().filter_map(|w| w.1.entropy));
    let undefined_windows = windows.len() - defined;

    let entropy_points = windows
        .iter()
        .map(|(t, c, _)| EntropyPoint {
            t: *t,
            e: c.entropy,
            class_count: c.classes,
            included_count: c.included,
        })
        .collect();
    let uniqueness_points = windows
        .into_iter()
        .map(|(t, c, rows)| UniquenessPoint {
            t,
            u: c.uniqueness(),
            unique_count: c.unique,
            included_count: c.included,
            unique_ids: rows.map(|r| ids_of(dataset, &r)),
        })
        .collect();

    (
        UniquenessResult {
            k,
            order,
            per_t: uniqueness_points,
            mean_u,
            min_u,
            max_u,
            undefined_windows,
        },
        EntropyResult {
            k,
            order,
            per_t: entropy_points,
            mean_e,
            min_e,
            max_e,
            undefined_windows,
        },
    )
}

/// Scans every selected start for one order, recording the requested
/// lengths. Returns, per entry of `ks`, the windows in start order.
fn scan_order<M: Measure>(
    dataset: &Dataset<M>,
    ks: &[usize],
    order: RoundingOrder,
    opts: &CurveOptions,
) -> Vec<Vec<WindowOutput>> {
    let m = dataset.m();
    let min_k = *ks.iter().min().expect("non-empty k list");
    let max_k = *ks.iter().max().expect("non-empty k list");
    let starts = window_starts(m, min_k, opts);
    let rounder = Rounder::new(order);

    let per_start: Vec<Vec<Found>> = starts
        .par_iter()
        .map_init(
            || Scratch::new(dataset.n()),
            |scratch, &t| {
                let reach = max_k.min(m - t);
                let mut found = vec![None; ks.len()];
                refine(dataset, t, reach, rounder, scratch, |k, counts, scratch| {
                    for (slot, &wanted) in found.iter_mut().zip(ks) {
                        if wanted == k {
                            let rows = opts.with_ids.then(|| scratch.singleton_rows());
                            *slot = Some((*counts, rows));
                        }
                    }
                });
                found
            },
        )
        .collect();

    let mut by_k: Vec<Vec<WindowOutput>> = vec![Vec::with_capacity(starts.len()); ks.len()];
    for (&t, found) in starts.iter().zip(per_start) {
        for (slot, entry) in by_k.iter_mut().zip(found) {
            if let Some((counts, rows)) = entry {
                slot.push((t, counts, rows));
            }
        }
    }
    by_k
}

pub fn uniqueness_curve<M: Measure>(
    dataset: &Dataset<M>,
    k: usize,
    order: RoundingOrder,
) -> Result<UniquenessResult> {
    uniqueness_curve_with(dataset, k, order, &CurveOptions::default())
}

/// Uniqueness at every selected start for windows of length `k`.
pub fn uniqueness_curve_with<M: Measure>(
    dataset: &Dataset<M>,
    k: usize,
    order: RoundingOrder,
    opts: &CurveOptions,
) -> Result<UniquenessResult> {
    check_k(dataset.m(), k)?;
    let windows = scan_order(dataset, &[k], order, opts).pop().unwrap();
    Ok(assemble(dataset, k, order, windows).0)
}

pub fn entropy_curve<M: Measure>(
    dataset: &Dataset<M>,
    k: usize,
    order: RoundingOrder,
) -> Result<EntropyResult> {
    entropy_curve_with(dataset, k, order, &CurveOptions::default())
}

pub fn entropy_curve_with<M: Measure>(
    dataset: &Dataset<M>,
    k: usize,
    order: RoundingOrder,
    opts: &CurveOptions,
) -> Result<EntropyResult> {
    check_k(dataset.m(), k)?;
    let opts = CurveOptions {
        with_ids: false,
        starts: opts.starts.clone(),
    };
    let windows = scan_order(dataset, &[k], order, &opts).pop().unwrap();
    Ok(assemble(dataset, k, order, windows).1)
}

/// Uniqueness and entropy curves for every `(k, order)` pair.
///
/// One refinement pass per order and start serves all window lengths.
/// Duplicate requests are ignored; cells come out order-major, in the order
/// the values were first requested.
pub fn sweep<M: Measure>(
    dataset: &Dataset<M>,
    ks: &[usize],
    orders: &[RoundingOrder],
    opts: &CurveOptions,
) -> Result<Vec<SweepCell>> {
    let ks = dedup_stable(ks);
    let orders = dedup_stable(orders);
    if ks.is_empty() || orders.is_empty() {
        return Err(Error::Config("sweep needs at least one k and one order".into()));
    }
    for &k in &ks {
        check_k(dataset.m(), k)?;
    }
    let mut cells = Vec::with_capacity(ks.len() * orders.len());
    for &order in &orders {
        let by_k = scan_order(dataset, &ks, order, opts);
        for (&k, windows) in ks.iter().zip(by_k) {
            let (uniqueness, entropy) = assemble(dataset, k, order, windows);
            cells.push(SweepCell {
                k,
                order,
                uniqueness,
                entropy,
            });
        }
    }
    Ok(cells)
}

fn dedup_stable<T: PartialEq + Copy>(items: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for &item in items {
        if !out.contains(&item) {
            out.push(item);
        }
    }
    out
}

/// Series whose rounded window starting at `t` equals the rounded `query`.
pub fn match_query<M: Measure>(
    dataset: &Dataset<M>,
    t: usize,
    query: &[u64],
    order: RoundingOrder,
) -> Result<MatchResult> {
    WindowSpec::new(t, query.len()).check(dataset.m())?;
    let rounder = Rounder::new(order);
    let target: Vec<u64> = query.iter().map(|&v| round_order(v, order)).collect();
    let matches: Vec<String> = (0..dataset.n())
        .filter(|&row| {
            target.iter().enumerate().all(|(j, &want)| {
                dataset
                    .value(row, t + j)
                    .is_some_and(|v| rounder.apply_u64(v.widen()) == want)
            })
        })
        .map(|row| dataset.series_ids()[row].clone())
        .collect();
    Ok(MatchResult {
        query: query.to_vec(),
        t,
        order,
        is_unique: matches.len() == 1,
        matches,
    })
}

//! Window scan by successive partition refinement.
//!
//! At a fixed start `t`, two series share the same window of length `k + 1`
//! exactly when they share the window of length `k` and the measure at
//! `t + k`. Each step therefore relabels every still-complete row by the pair
//! (previous class, next measure). Pairs are compared as exact keys, so class
//! identity is exact vector identity and a scan over `k = 1..K` costs
//! `O(n * K)` rather than `O(n * K^2)`.

use rustc_hash::FxHashMap;

use crate::dataset::Dataset;
use crate::degrade::Rounder;
use crate::scalar::Measure;

const DROPPED: u32 = u32::MAX;

/// Counts of one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct WindowCounts {
    pub included: usize,
    pub unique: usize,
    pub classes: usize,
    pub entropy: Option<f64>,
}

impl WindowCounts {
    pub fn uniqueness(&self) -> Option<f64> {
        (self.included > 0).then(|| self.unique as f64 / self.included as f64)
    }
}

/// Per-worker buffers, reused across windows.
pub(crate) struct Scratch<M> {
    class: Vec<u32>,
    sizes: Vec<u32>,
    table: FxHashMap<(u32, M), u32>,
}

impl<M: Measure> Scratch<M> {
    pub fn new(n: usize) -> Self {
        Self {
            class: vec![0; n],
            sizes: Vec::new(),
            table: FxHashMap::default(),
        }
    }

    /// Rows whose current class is a singleton, in canonical order.
    pub fn singleton_rows(&self) -> Vec<usize> {
        self.class
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != DROPPED && self.sizes[c as usize] == 1)
            .map(|(row, _)| row)
            .collect()
    }

    fn counts(&self) -> WindowCounts {
        let mut included = 0usize;
        let mut unique = 0usize;
        let mut weighted = 0.0f64;
        for &size in &self.sizes {
            included += size as usize;
            if size == 1 {
                unique += 1;
            } else {
                let c = size as f64;
                weighted += c * c.log2();
            }
        }
        let classes = self.sizes.len();
        let entropy = match classes {
            0 => None,
            1 => Some(0.0),
            _ => {
                let total = included as f64;
                Some((total.log2() - weighted / total).max(0.0))
            }
        };
        WindowCounts {
            included,
            unique,
            classes,
            entropy,
        }
    }
}

/// Scans windows starting at `t` for `k = 1..=max_k`, calling `visit(k,
/// counts, scratch)` after each length. `t + max_k` must not exceed `m`.
pub(crate) fn refine<M, F>(
    dataset: &Dataset<M>,
    t: usize,
    max_k: usize,
    rounder: Rounder,
    scratch: &mut Scratch<M>,
    mut visit: F,
) where
    M: Measure,
    F: FnMut(usize, &WindowCounts, &Scratch<M>),
{
    debug_assert!(t + max_k <= dataset.m());
    scratch.class.iter_mut().for_each(|c| *c = 0);
    for step in 0..max_k {
        let (values, present) = dataset.column(t + step);
        let Scratch {
            class,
            sizes,
            table,
        } = scratch;
        table.clear();
        sizes.clear();
        for ((slot, &value), &is_present) in class.iter_mut().zip(values).zip(present) {
            if *slot == DROPPED {
                continue;
            }
            if !is_present {
                *slot = DROPPED;
                continue;
            }
            let key = (*slot, rounder.apply(value));
            let next = sizes.len() as u32;
            let id = *table.entry(key).or_insert(next);
            if id == next {
                sizes.push(1);
            } else {
                sizes[id as usize] += 1;
            }
            *slot = id;
        }
        let counts = scratch.counts();
        visit(step + 1, &counts, scratch);
    }
}

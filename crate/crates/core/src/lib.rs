//! Re-identification risk of time-series populations.
//!
//! Given a population of equally sampled series, the uniqueness at timestamp
//! `t` for window length `k` is the fraction of series whose `k` consecutive
//! measures starting at `t` are not shared by any other series. Window
//! entropy is the Shannon entropy of the same multiset of subsequences.
//! Both can be computed after rounding measures to a coarser order of
//! magnitude.
//!
//! The core types are generic over the measure integer ([`Measure`]) and the
//! float used for derived statistics ([`Real`]); the aliases below fix the
//! common choices.

pub mod dataset;
pub mod degrade;
pub mod engine;
pub mod error;
pub mod io;
pub mod scalar;
pub mod stats;
pub mod synth;

pub use dataset::{DatasetMeta, TimeAxis, TimeGrid, Unit, WindowSet, WindowSpec};
pub use degrade::{degrade_dataset, round_order, RoundingOrder};
pub use engine::{
    brute_force_uniqueness, entropy_at, entropy_curve, match_query, sweep, uniqueness_at,
    uniqueness_curve, CurveOptions, EntropyResult, MatchResult, SweepCell, UniquenessResult,
    WindowEntropy, WindowUniqueness,
};
pub use error::{Error, Result};
pub use scalar::{Measure, Real};
pub use stats::{GroupKey, Granularity, TimeMapping};
pub use synth::{Preset, SynthConfig};

/// Dataset with 16-bit measures; enough for the default 36 kW domain.
pub type Dataset16 = dataset::Dataset<u16>;
/// Dataset with 32-bit measures.
pub type Dataset32 = dataset::Dataset<u32>;
/// Dataset with 64-bit measures.
pub type Dataset64 = dataset::Dataset<u64>;

/// Double precision auxiliary series.
pub type AuxSeries = stats::AuxSeries<f64>;
/// Single precision auxiliary series.
pub type AuxSeries32 = stats::AuxSeries<f32>;
/// Double precision grouped series.
pub type GroupedSeries = stats::GroupedSeries<f64>;
/// Double precision population summary.
pub type Summary = stats::Summary<f64>;

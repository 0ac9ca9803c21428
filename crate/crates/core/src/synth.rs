//! Seeded synthetic consumption populations.
//!
//! A household's measure at step `t` is
//!
//! ```text
//! clamp(round(profile[(t + shift) mod p] * scale * seasonal(t) * noise)), 0, domain_max)
//! ```
//!
//! where `scale` is log-normal per household, `noise` is mean-one log-normal
//! per measure and `seasonal` peaks around January 1st. Zero readings come in
//! runs from a two-state Markov chain, missing cells in fixed-length bursts.
//!
//! Every household draws from its own ChaCha8 stream seeded with
//! `splitmix64(seed ^ household_index)`, so output is independent of the
//! number of worker threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, DatasetBuilder, DatasetMeta, TimeAxis, TimeGrid, Unit, DEFAULT_DOMAIN_MAX};
use crate::error::{Error, Result};
use crate::scalar::Measure;

const SECONDS_PER_DAY: u64 = 86_400;
/// 2019-01-01T00:00:00Z
pub const DEFAULT_START_EPOCH: u64 = 1_546_300_800;
/// 2000-01-01T00:00:00Z, phase origin of the seasonal cycle.
const SEASON_ORIGIN: f64 = 946_684_800.0;
const DAYS_PER_YEAR: f64 = 365.25;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalParams {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n: usize,
    pub m: usize,
    pub step_seconds: u64,
    pub seed: u64,
    /// Epoch seconds of the first timestamp.
    pub start_epoch: u64,
    /// One diurnal cycle; `len * step_seconds` must equal one day.
    pub base_profile: Vec<f64>,
    /// Per-household multiplier.
    pub scale_distribution: LogNormalParams,
    /// Dispersion of the mean-one multiplicative noise.
    pub noise_sigma: f64,
    /// Long-run share of zero readings.
    pub zero_prob: f64,
    /// Mean length (steps) of a run of zero readings.
    pub zero_run_mean: f64,
    /// Long-run share of missing cells.
    pub missing_prob: f64,
    pub missing_burst_len: usize,
    /// Household profile shifts are drawn uniformly in `0..=time_shift_max`.
    pub time_shift_max: usize,
    /// Relative amplitude of the annual cosine modulation.
    pub seasonal_amplitude: f64,
    pub domain_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Small,
    Medium,
    Large,
}

impl Preset {
    pub fn households(self) -> usize {
        match self {
            Preset::Small => 1_000,
            Preset::Medium => 100_000,
            Preset::Large => 1_000_000,
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Preset::Small),
            "medium" => Ok(Preset::Medium),
            "large" => Ok(Preset::Large),
            _ => Err(Error::Config(format!("unknown preset `{s}`"))),
        }
    }
}

impl Default for SynthConfig {
    /// Calibrated population of 10,000 half-hourly households over one week.
    fn default() -> Self {
        Self {
            n: 10_000,
            m: 336,
            step_seconds: 1800,
            seed: 0x5EED_2022,
            start_epoch: DEFAULT_START_EPOCH,
            base_profile: default_base_profile(48),
            scale_distribution: LogNormalParams {
                mu: 6.175,
                sigma: 0.75,
            },
            noise_sigma: 0.55,
            zero_prob: 0.05,
            zero_run_mean: 8.0,
            missing_prob: 0.0,
            missing_burst_len: 4,
            time_shift_max: 4,
            seasonal_amplitude: 0.2,
            domain_max: DEFAULT_DOMAIN_MAX,
        }
    }
}

/// Calibrated presets over one week of half-hourly measures.
pub fn default_calibrated_config(preset: Preset) -> SynthConfig {
    SynthConfig {
        n: preset.households(),
        ..SynthConfig::default()
    }
}

/// Two-peak diurnal shape (noon and evening) over `points` steps, mean one.
pub fn default_base_profile(points: usize) -> Vec<f64> {
    let bump = |hour: f64, centre: f64, width: f64| {
        let mut d = (hour - centre).abs();
        d = d.min(24.0 - d);
        (-0.5 * (d / width).powi(2)).exp()
    };
    let raw: Vec<f64> = (0..points)
        .map(|i| {
            let hour = (i as f64 + 0.5) * 24.0 / points as f64;
            0.45 + 0.25 * bump(hour, 7.5, 1.0) + 0.55 * bump(hour, 12.5, 1.5) + 1.0 * bump(hour, 19.5, 2.0)
        })
        .collect();
    let mean = raw.iter().sum::<f64>() / points as f64;
    raw.into_iter().map(|v| v / mean).collect()
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("{name} must be in [0, 1], got {p}")));
    }
    Ok(())
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::Config("n and m must be positive".into()));
        }
        if self.step_seconds == 0 {
            return Err(Error::Config("step_seconds must be positive".into()));
        }
        let p = self.base_profile.len() as u64;
        if p == 0 || p * self.step_seconds != SECONDS_PER_DAY {
            return Err(Error::Config(format!(
                "base_profile has {p} points; with step {} s it must cover exactly one day",
                self.step_seconds
            )));
        }
        if self.base_profile.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("base_profile must be finite and non-negative".into()));
        }
        let LogNormalParams { mu, sigma } = self.scale_distribution;
        if !mu.is_finite() || !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::Config("scale distribution needs finite mu and sigma >= 0".into()));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::Config("noise_sigma must be finite and >= 0".into()));
        }
        check_probability("zero_prob", self.zero_prob)?;
        check_probability("missing_prob", self.missing_prob)?;
        if self.zero_run_mean.is_nan() || self.zero_run_mean < 1.0 {
            return Err(Error::Config("zero_run_mean must be >= 1".into()));
        }
        if self.zero_prob < 1.0 && self.zero_entry_prob() > 1.0 {
            return Err(Error::Config(format!(
                "zero_run_mean {} is too short for zero_prob {}",
                self.zero_run_mean, self.zero_prob
            )));
        }
        if self.missing_burst_len == 0 {
            return Err(Error::Config("missing_burst_len must be positive".into()));
        }
        if !self.seasonal_amplitude.is_finite() || !(0.0..1.0).contains(&self.seasonal_amplitude) {
            return Err(Error::Config("seasonal_amplitude must be in [0, 1)".into()));
        }
        Ok(())
    }

    /// Probability of entering a zero run from a non-zero reading, chosen so
    /// the stationary zero share equals `zero_prob`.
    fn zero_entry_prob(&self) -> f64 {
        let f = self.zero_prob;
        f / (self.zero_run_mean * (1.0 - f))
    }

    /// Probability of starting a missing burst outside a burst, chosen so the
    /// long-run missing share equals `missing_prob`.
    fn burst_start_prob(&self) -> f64 {
        let f = self.missing_prob;
        let len = self.missing_burst_len as f64;
        f / (len * (1.0 - f) + f)
    }

    fn seasonal(&self, t: usize) -> f64 {
        if self.seasonal_amplitude == 0.0 {
            return 1.0;
        }
        let epoch = self.start_epoch as f64 + (t as u64 * self.step_seconds) as f64;
        let days = (epoch - SEASON_ORIGIN) / SECONDS_PER_DAY as f64;
        1.0 + self.seasonal_amplitude * (2.0 * PI * days / DAYS_PER_YEAR).cos()
    }
}

struct Household<M> {
    values: Vec<M>,
    present: Vec<bool>,
}

fn household<M: Measure>(cfg: &SynthConfig, seasonal: &[f64], index: usize) -> Household<M> {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(cfg.seed ^ index as u64));
    let p = cfg.base_profile.len();
    let shift = rng.gen_range(0..=cfg.time_shift_max);
    let LogNormalParams { mu, sigma } = cfg.scale_distribution;
    let scale = LogNormal::new(mu, sigma).expect("validated").sample(&mut rng);
    let noise_shift = -0.5 * cfg.noise_sigma * cfg.noise_sigma;

    let zero_entry = if cfg.zero_prob >= 1.0 { 1.0 } else { cfg.zero_entry_prob() };
    let zero_exit = 1.0 / cfg.zero_run_mean;
    let burst_start = cfg.burst_start_prob();

    let mut in_zero_run = rng.gen::<f64>() < cfg.zero_prob;
    let mut burst_left = if rng.gen::<f64>() < cfg.missing_prob {
        rng.gen_range(1..=cfg.missing_burst_len)
    } else {
        0
    };

    let domain_max = cfg.domain_max as f64;
    let mut values = Vec::with_capacity(cfg.m);
    let mut present = Vec::with_capacity(cfg.m);
    for (t, season) in seasonal.iter().enumerate() {
        let z: f64 = rng.sample(StandardNormal);
        let u_zero: f64 = rng.gen();
        let u_missing: f64 = rng.gen();
        if t > 0 {
            in_zero_run = if in_zero_run {
                cfg.zero_prob >= 1.0 || u_zero >= zero_exit
            } else {
                u_zero < zero_entry
            };
        }
        if t > 0 || burst_left == 0 {
            burst_left = burst_left.saturating_sub(1);
            if burst_left == 0 && u_missing < burst_start {
                burst_left = cfg.missing_burst_len;
            }
        }

        let level = cfg.base_profile[(t + shift) % p] * scale * season;
        let raw = (level * (cfg.noise_sigma * z + noise_shift).exp()).round();
        let watts = if in_zero_run { 0.0 } else { raw.clamp(0.0, domain_max) };
        values.push(M::narrow(watts as u64).expect("clamped to domain"));
        present.push(burst_left == 0);
    }
    Household { values, present }
}

/// Width of zero-padded household ids for `n` households.
fn id_width(n: usize) -> usize {
    n.saturating_sub(1).to_string().len().max(1)
}

/// Generates the population described by `cfg`.
pub fn generate<M: Measure>(cfg: &SynthConfig) -> Result<Dataset<M>> {
    cfg.validate()?;
    let meta = DatasetMeta {
        unit: Unit::W,
        step_seconds: cfg.step_seconds,
        domain_max: cfg.domain_max,
        time_axis: TimeAxis::Epoch,
    };
    let grid = TimeGrid::new(cfg.start_epoch, cfg.step_seconds, cfg.m)?;
    let mut builder = DatasetBuilder::<M>::new(meta, grid, cfg.n)?;
    let seasonal: Vec<f64> = (0..cfg.m).map(|t| cfg.seasonal(t)).collect();
    let width = id_width(cfg.n);

    for chunk_start in (0..cfg.n).step_by(CHUNK) {
        let chunk_end = (chunk_start + CHUNK).min(cfg.n);
        let households: Vec<Household<M>> = (chunk_start..chunk_end)
            .into_par_iter()
            .map(|h| household(cfg, &seasonal, h))
            .collect();
        for (offset, hh) in households.into_iter().enumerate() {
            let id = format!("H{:0width$}", chunk_start + offset);
            let cells = hh
                .values
                .into_iter()
                .zip(hh.present)
                .map(|(v, p)| p.then_some(v));
            builder.push_row(id, cells)?;
        }
    }
    builder.finish()
}

//! Machine-readable outputs, schema `unitrace-report/v1`.
//!
//! Every document ends with a `timing` block; everything before it is a
//! pure function of the inputs and parameters.

use serde::Serialize;
use unitrace_core::engine::{EntropyPoint, UniquenessPoint};
use unitrace_core::stats::GroupedSeries;
use unitrace_core::dataset::Dataset;
use unitrace_core::{Measure, MatchResult, RoundingOrder, SweepCell, TimeAxis, Unit};

pub const SCHEMA: &str = "unitrace-report/v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Fingerprint {
    pub n: usize,
    pub m: usize,
    pub step_seconds: u64,
    pub unit: Unit,
    pub domain_max: u64,
    pub time_axis: TimeAxis,
    pub first_timestamp: u64,
    pub content_hash: String,
}

impl Fingerprint {
    pub fn of<M: Measure>(dataset: &Dataset<M>) -> Self {
        let meta = dataset.meta();
        Self {
            n: dataset.n(),
            m: dataset.m(),
            step_seconds: meta.step_seconds,
            unit: meta.unit,
            domain_max: meta.domain_max,
            time_axis: meta.time_axis,
            first_timestamp: dataset.timestamp(0),
            content_hash: unitrace_core::io::content_hash(dataset),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Filters {
    pub from: Option<String>,
    pub to: Option<String>,
    pub hours: Option<String>,
    pub utc_offset_seconds: i32,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditParameters {
    pub k: Vec<usize>,
    pub round: Vec<RoundingOrder>,
    pub entropy: bool,
    pub filters: Filters,
    /// Window starts admitted by the filters.
    pub selected_starts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessSummary {
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub windows: usize,
    pub undefined_windows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropySummary {
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub windows: usize,
    pub undefined_windows: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub k: usize,
    pub round: RoundingOrder,
    pub uniqueness: UniquenessSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniqueness_per_t: Option<Vec<UniquenessPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_per_t: Option<Vec<EntropyPoint>>,
}

impl CellReport {
    pub fn from_cell(cell: &SweepCell, entropy: bool, per_t: bool) -> Self {
        let u = &cell.uniqueness;
        let e = &cell.entropy;
        Self {
            k: cell.k,
            round: cell.order,
            uniqueness: UniquenessSummary {
                mean: u.mean_u,
                min: u.min_u,
                max: u.max_u,
                windows: u.per_t.len(),
                undefined_windows: u.undefined_windows,
            },
            entropy: entropy.then_some(EntropySummary {
                mean: e.mean_e,
                min: e.min_e,
                max: e.max_e,
                windows: e.per_t.len(),
                undefined_windows: e.undefined_windows,
            }),
            uniqueness_per_t: per_t.then(|| u.per_t.clone()),
            entropy_per_t: (per_t && entropy).then(|| e.per_t.clone()),
        }
    }
}

/// Output of `audit` and `sweep`.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub tool_version: &'static str,
    pub dataset: Fingerprint,
    pub parameters: AuditParameters,
    pub results: Vec<CellReport>,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct Correlation {
    pub x: String,
    pub y: String,
    pub r: Option<f64>,
    pub pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupedReport {
    pub series: String,
    #[serde(flatten)]
    pub grouped: GroupedSeries<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelateParameters {
    pub k: usize,
    pub round: RoundingOrder,
    pub aux: Vec<String>,
    pub group: Vec<String>,
    pub filters: Filters,
    pub selected_starts: usize,
}

/// Output of `correlate`.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelateReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub tool_version: &'static str,
    pub dataset: Fingerprint,
    pub parameters: CorrelateParameters,
    pub correlations: Vec<Correlation>,
    pub groups: Vec<GroupedReport>,
    pub timing: Timing,
}

/// Output of `match`.
#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub tool_version: &'static str,
    pub dataset: Fingerprint,
    pub timestamp: u64,
    #[serde(flatten)]
    pub result: MatchResult,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerateSummary {
    pub mean: f64,
    pub std: f64,
    pub zero_fraction: f64,
    pub missing_fraction: f64,
}

/// Output of `generate`.
#[derive(Debug, Clone, Serialize)]
pub struct GenerateReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub tool_version: &'static str,
    pub dataset: Fingerprint,
    pub output: String,
    pub sidecar: String,
    pub config: unitrace_core::SynthConfig,
    pub summary: Option<GenerateSummary>,
    pub timing: Timing,
}

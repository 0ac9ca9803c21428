use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "unitrace", version, about = "Re-identification risk audits for populations of time series")]
pub struct Cli {
    /// Worker threads (0 uses every core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic population as long CSV plus sidecar.
    Generate(GenerateArgs),
    /// Uniqueness (and optionally entropy) for every (k, order) pair.
    Audit(AuditArgs),
    /// Mean/min/max uniqueness per k, one CSV per rounding order.
    Sweep(SweepArgs),
    /// Pearson correlations between uniqueness, entropy, consumption and aux series.
    Correlate(CorrelateArgs),
    /// Series matching known measures at a given position.
    Match(MatchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupBy {
    Month,
    Hour,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Long CSV with header `series_id,timestamp,value`.
    pub input: PathBuf,
    /// Metadata sidecar; defaults to `<input stem>.meta.json` when present.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Largest admissible measure, overriding the sidecar.
    #[arg(long)]
    pub domain_max: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// First window start kept: raw timestamp or YYYY-MM-DD (inclusive).
    #[arg(long)]
    pub from: Option<String>,
    /// Window starts before this bound are kept: raw timestamp or YYYY-MM-DD.
    #[arg(long)]
    pub to: Option<String>,
    /// Hours of day of kept window starts, `a-b` (half-open, may wrap) or `h`.
    #[arg(long)]
    pub hours: Option<String>,
    /// Epoch seconds of index 0 for datasets with index timestamps.
    #[arg(long)]
    pub epoch_origin: Option<i64>,
    /// Offset from UTC, in seconds, for dates and hours of day.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub utc_offset: i32,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory; the JSON report goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Destination CSV file, or directory receiving `synthetic.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON configuration; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Calibrated preset: small, medium or large.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of series.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of timestamps.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub zero_prob: Option<f64>,
    #[arg(long)]
    pub missing_prob: Option<f64>,
    #[arg(long)]
    pub seasonal_amplitude: Option<f64>,
    #[arg(long)]
    pub start_epoch: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Window lengths: list and/or inclusive ranges, e.g. `2,4` or `1..7`.
    #[arg(long)]
    pub k: String,
    /// Rounding orders, e.g. `0` or `0,1,2,3`.
    #[arg(long, default_value = "0")]
    pub round: String,
    /// Accept rounding orders above 3.
    #[arg(long)]
    pub allow_high_order: bool,
    /// Also compute window entropy.
    #[arg(long)]
    pub entropy: bool,
    /// Include per-timestamp values in the JSON report.
    #[arg(long)]
    pub per_t: bool,
    /// Include the ids of unique series (implies `--per-t`).
    #[arg(long)]
    pub ids: bool,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Accepted for symmetry with `generate`; audits are deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "1..7")]
    pub k: String,
    #[arg(long, default_value = "0,1,2,3")]
    pub round: String,
    #[arg(long)]
    pub allow_high_order: bool,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "5")]
    pub k: String,
    #[arg(long, default_value = "0")]
    pub round: String,
    #[arg(long)]
    pub allow_high_order: bool,
    /// Auxiliary CSV `timestamp,value`, labelled by file stem. Repeatable.
    #[arg(long)]
    pub aux: Vec<PathBuf>,
    /// Also report monthly or hourly aggregates. Repeatable.
    #[arg(long, value_enum)]
    pub group: Vec<GroupBy>,
    #[command(flatten)]
    pub filter: FilterArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Window start as a timestamp index.
    #[arg(long, conflicts_with = "timestamp", required_unless_present = "timestamp")]
    pub t: Option<usize>,
    /// Window start as a timestamp value of the dataset.
    #[arg(long)]
    pub timestamp: Option<u64>,
    /// Known consecutive measures, comma separated.
    #[arg(long)]
    pub query: String,
    #[arg(long, default_value = "0")]
    pub round: String,
    #[arg(long)]
    pub allow_high_order: bool,
    /// Output directory; the JSON result goes to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

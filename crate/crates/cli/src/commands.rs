use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use unitrace_core::dataset::Dataset;
use unitrace_core::engine::{EntropyResult, UniquenessResult};
use unitrace_core::io::{sidecar_path, write_long_csv};
use unitrace_core::stats::{align, group_by_time, pearson, population_mean_series, summary, AuxSeries};
use unitrace_core::synth::{default_calibrated_config, generate as synth_generate};
use unitrace_core::{
    match_query, sweep, CurveOptions, Error as CoreError, Granularity, Measure, Preset, RoundingOrder,
    SynthConfig, TimeMapping,
};

use crate::args::{
    AuditArgs, CorrelateArgs, FilterArgs, Format, GenerateArgs, GroupBy, MatchArgs, OutputArgs, SweepArgs,
};
use crate::data::{self, width_for, with_dataset, Width};
use crate::error::{CliError, CliResult};
use crate::params::{parse_k_list, parse_round_list, parse_values, HourRange, TimeBound, TimeFilter};
use crate::report::*;

/// Per-invocation context.
pub struct Ctx {
    pub threads: usize,
    pub started: Instant,
}

impl Ctx {
    fn timing(&self) -> Timing {
        let micros = self.started.elapsed().as_micros() as f64;
        Timing {
            elapsed_ms: micros / 1000.0,
            threads: self.threads,
        }
    }
}

/// Parsed `--from/--to/--hours` plus the calendar mapping options.
struct Selection {
    filter: TimeFilter,
    report: Filters,
    epoch_origin: Option<i64>,
}

impl Selection {
    fn from_args(args: &FilterArgs) -> CliResult<Self> {
        let filter = TimeFilter {
            from: args.from.as_deref().map(TimeBound::parse).transpose()?,
            to: args.to.as_deref().map(TimeBound::parse).transpose()?,
            hours: args.hours.as_deref().map(HourRange::parse).transpose()?,
        };
        Ok(Self {
            filter,
            report: Filters {
                from: args.from.clone(),
                to: args.to.clone(),
                hours: args.hours.clone(),
                utc_offset_seconds: args.utc_offset,
            },
            epoch_origin: args.epoch_origin,
        })
    }

    fn mapping<M>(&self, dataset: &Dataset<M>) -> TimeMapping {
        let mut mapping = TimeMapping::for_dataset(dataset);
        mapping.index_origin = self.epoch_origin;
        mapping.utc_offset_seconds = self.report.utc_offset_seconds;
        mapping
    }

    /// Window starts admitted by the filters, and their count.
    fn starts<M>(&self, dataset: &Dataset<M>) -> CliResult<(Option<Vec<usize>>, usize)> {
        if self.filter.is_empty() {
            return Ok((None, dataset.m()));
        }
        let mapping = self.mapping(dataset);
        let mut kept = Vec::new();
        for t in 0..dataset.m() {
            if self.filter.keeps(dataset.timestamp(t), &mapping)? {
                kept.push(t);
            }
        }
        if kept.is_empty() {
            return Err(CliError::param("time filters exclude every window start"));
        }
        let count = kept.len();
        Ok((Some(kept), count))
    }
}

fn single<T: Copy>(items: Vec<T>, what: &str) -> CliResult<T> {
    match items.as_slice() {
        [one] => Ok(*one),
        _ => Err(CliError::param(format!("exactly one {what} is expected here"))),
    }
}

fn output_dir(out: &OutputArgs) -> CliResult<Option<&Path>> {
    match (&out.out, out.format) {
        (None, Format::Csv) => Err(CliError::param("--format csv needs --out <dir>")),
        (Some(dir), _) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            Ok(Some(dir.as_path()))
        }
        (None, Format::Json) => Ok(None),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

/// Writes the report to `dir/name`, or stdout without a directory.
fn emit<T: Serialize>(value: &T, dir: Option<&Path>, name: &str) -> CliResult<()> {
    let text = to_json(value);
    match dir {
        Some(dir) => {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| CliError::io(&path, e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_csv<S: Serialize>(path: &Path, rows: impl IntoIterator<Item = S>) -> CliResult<()> {
    let fail = |e: csv::Error| CliError::Input(format!("{}: {e}", path.display()));
    let mut writer = csv::Writer::from_path(path).map_err(fail)?;
    for row in rows {
        writer.serialize(row).map_err(fail)?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct UniquenessRow {
    t: usize,
    u: Option<f64>,
    unique_count: usize,
    included_count: usize,
}

#[derive(Serialize)]
struct EntropyRow {
    t: usize,
    e: Option<f64>,
    class_count: usize,
    included_count: usize,
}

#[derive(Serialize)]
struct SweepRow {
    k: usize,
    mean_u: Option<f64>,
    min_u: Option<f64>,
    max_u: Option<f64>,
}

#[derive(Serialize)]
struct PairRow {
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct GroupRow {
    group: String,
    mean: f64,
    min: f64,
    max: f64,
    count: usize,
}

fn write_uniqueness_csv(dir: &Path, u: &UniquenessResult) -> CliResult<()> {
    let path = dir.join(format!("uniqueness_k{}_r{}.csv", u.k, u.order));
    write_csv(
        &path,
        u.per_t.iter().map(|p| UniquenessRow {
            t: p.t,
            u: p.u,
            unique_count: p.unique_count,
            included_count: p.included_count,
        }),
    )
}

fn write_entropy_csv(dir: &Path, e: &EntropyResult) -> CliResult<()> {
    let path = dir.join(format!("entropy_k{}_r{}.csv", e.k, e.order));
    write_csv(
        &path,
        e.per_t.iter().map(|p| EntropyRow {
            t: p.t,
            e: p.e,
            class_count: p.class_count,
            included_count: p.included_count,
        }),
    )
}

pub fn audit(args: &AuditArgs, ctx: &Ctx) -> CliResult<()> {
    let ks = parse_k_list(&args.k)?;
    let orders = parse_round_list(&args.round, args.allow_high_order)?;
    let selection = Selection::from_args(&args.filter)?;
    let dir = output_dir(&args.output)?;
    let dataset = data::load(&args.input)?;
    with_dataset!(&dataset, ds => audit_typed(ds, args, &ks, &orders, &selection, dir, ctx))
}

fn audit_typed<M: Measure>(
    ds: &Dataset<M>,
    args: &AuditArgs,
    ks: &[usize],
    orders: &[RoundingOrder],
    selection: &Selection,
    dir: Option<&Path>,
    ctx: &Ctx,
) -> CliResult<()> {
    let (starts, selected_starts) = selection.starts(ds)?;
    let opts = CurveOptions {
        with_ids: args.ids,
        starts,
    };
    let cells = sweep(ds, ks, orders, &opts).map_err(CliError::from_analysis)?;
    let per_t = args.per_t || args.ids;
    let results = cells
        .iter()
        .map(|c| CellReport::from_cell(c, args.entropy, per_t))
        .collect();
    if let (Some(dir), Format::Csv) = (dir, args.output.format) {
        for cell in &cells {
            write_uniqueness_csv(dir, &cell.uniqueness)?;
            if args.entropy {
                write_entropy_csv(dir, &cell.entropy)?;
            }
        }
    }
    let report = AuditReport {
        schema: SCHEMA,
        command: "audit",
        tool_version: TOOL_VERSION,
        dataset: Fingerprint::of(ds),
        parameters: AuditParameters {
            k: ks.to_vec(),
            round: orders.to_vec(),
            entropy: args.entropy,
            filters: selection.report.clone(),
            selected_starts,
        },
        results,
        timing: ctx.timing(),
    };
    emit(&report, dir, "audit.json")
}

pub fn sweep_cmd(args: &SweepArgs, ctx: &Ctx) -> CliResult<()> {
    let ks = parse_k_list(&args.k)?;
    let orders = parse_round_list(&args.round, args.allow_high_order)?;
    let selection = Selection::from_args(&args.filter)?;
    let dir = output_dir(&args.output)?;
    let dataset = data::load(&args.input)?;
    with_dataset!(&dataset, ds => sweep_typed(ds, &ks, &orders, &selection, dir, ctx))
}

fn sweep_typed<M: Measure>(
    ds: &Dataset<M>,
    ks: &[usize],
    orders: &[RoundingOrder],
    selection: &Selection,
    dir: Option<&Path>,
    ctx: &Ctx,
) -> CliResult<()> {
    let (starts, selected_starts) = selection.starts(ds)?;
    let opts = CurveOptions {
        with_ids: false,
        starts,
    };
    let cells = sweep(ds, ks, orders, &opts).map_err(CliError::from_analysis)?;
    if let Some(dir) = dir {
        for &order in orders {
            let path = dir.join(format!("sweep_r{order}.csv"));
            let rows = cells.iter().filter(|c| c.order == order).map(|c| SweepRow {
                k: c.k,
                mean_u: c.uniqueness.mean_u,
                min_u: c.uniqueness.min_u,
                max_u: c.uniqueness.max_u,
            });
            write_csv(&path, rows)?;
        }
    }
    let report = AuditReport {
        schema: SCHEMA,
        command: "sweep",
        tool_version: TOOL_VERSION,
        dataset: Fingerprint::of(ds),
        parameters: AuditParameters {
            k: ks.to_vec(),
            round: orders.to_vec(),
            entropy: true,
            filters: selection.report.clone(),
            selected_starts,
        },
        results: cells.iter().map(|c| CellReport::from_cell(c, true, false)).collect(),
        timing: ctx.timing(),
    };
    emit(&report, dir, "sweep.json")
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "aux".into())
}

fn file_safe(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Correlation of paired values; degenerate inputs give `r = null`.
fn correlation(x: &str, y: &str, xs: &[f64], ys: &[f64]) -> Correlation {
    let (r, note) = match pearson(xs, ys) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Correlation {
        x: x.into(),
        y: y.into(),
        r,
        pairs: xs.len(),
        note,
    }
}

/// Values defined on both sides, matched by position.
fn paired(a: &[(u64, Option<f64>)], b: &[(u64, Option<f64>)]) -> (Vec<f64>, Vec<f64>) {
    a.iter()
        .zip(b)
        .filter_map(|(&(_, x), &(_, y))| Some((x?, y?)))
        .unzip()
}

pub fn correlate(args: &CorrelateArgs, ctx: &Ctx) -> CliResult<()> {
    let k = single(parse_k_list(&args.k)?, "k")?;
    let order = single(parse_round_list(&args.round, args.allow_high_order)?, "rounding order")?;
    let selection = Selection::from_args(&args.filter)?;
    let dir = output_dir(&args.output)?;
    let mut aux = Vec::with_capacity(args.aux.len());
    for path in &args.aux {
        let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        let series = AuxSeries::<f64>::read_csv(label_of(path), std::io::BufReader::new(file))
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        aux.push((path.clone(), series));
    }
    let dataset = data::load(&args.input)?;
    with_dataset!(&dataset, ds => correlate_typed(ds, args, k, order, &aux, &selection, dir, ctx))
}

#[allow(clippy::too_many_arguments)]
fn correlate_typed<M: Measure>(
    ds: &Dataset<M>,
    args: &CorrelateArgs,
    k: usize,
    order: RoundingOrder,
    aux: &[(PathBuf, AuxSeries<f64>)],
    selection: &Selection,
    dir: Option<&Path>,
    ctx: &Ctx,
) -> CliResult<()> {
    let (starts, selected_starts) = selection.starts(ds)?;
    let opts = CurveOptions {
        with_ids: false,
        starts,
    };
    let cell = sweep(ds, &[k], &[order], &opts)
        .map_err(CliError::from_analysis)?
        .pop()
        .expect("one cell");

    // Mean consumption over each window, from the population mean series.
    let population = population_mean_series::<M, f64>(ds);
    let mut prefix = vec![(0.0f64, 0usize); ds.m() + 1];
    for (i, v) in population.values.iter().enumerate() {
        let (s, c) = prefix[i];
        prefix[i + 1] = match v {
            Some(v) => (s + v, c + 1),
            None => (s, c),
        };
    }
    let at = |t: usize| ds.timestamp(t);
    let uniqueness: Vec<(u64, Option<f64>)> =
        cell.uniqueness.per_t.iter().map(|p| (at(p.t), p.u)).collect();
    let entropy: Vec<(u64, Option<f64>)> = cell.entropy.per_t.iter().map(|p| (at(p.t), p.e)).collect();
    let consumption: Vec<(u64, Option<f64>)> = cell
        .uniqueness
        .per_t
        .iter()
        .map(|p| {
            let (s0, c0) = prefix[p.t];
            let (s1, c1) = prefix[p.t + k];
            let count = c1 - c0;
            (at(p.t), (count > 0).then(|| (s1 - s0) / count as f64))
        })
        .collect();

    let mut correlations = Vec::new();
    let mut pair_files: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut add = |x: &str, y: &str, xs: Vec<f64>, ys: Vec<f64>| {
        correlations.push(correlation(x, y, &xs, &ys));
        pair_files.push((format!("pairs_{}_vs_{}.csv", file_safe(x), file_safe(y)), xs, ys));
    };
    let (xs, ys) = paired(&uniqueness, &entropy);
    add("uniqueness", "entropy", xs, ys);
    let (xs, ys) = paired(&uniqueness, &consumption);
    add("uniqueness", "mean_consumption", xs, ys);
    for (_, series) in aux {
        let with_consumption = align(series, &consumption).map_err(CliError::from_analysis)?;
        add("mean_consumption", &series.label, with_consumption.x, with_consumption.y);
        let with_uniqueness = align(series, &uniqueness).map_err(CliError::from_analysis)?;
        add("uniqueness", &series.label, with_uniqueness.x, with_uniqueness.y);
    }

    let mapping = selection.mapping(ds);
    let mut groups = Vec::new();
    for &group in &args.group {
        let granularity = match group {
            GroupBy::Month => Granularity::Month,
            GroupBy::Hour => Granularity::HourOfDay,
        };
        for (name, points) in [
            ("uniqueness", &uniqueness),
            ("entropy", &entropy),
            ("mean_consumption", &consumption),
        ] {
            let defined: Vec<(u64, f64)> = points.iter().filter_map(|&(ts, v)| Some((ts, v?))).collect();
            let grouped = group_by_time(&defined, granularity, &mapping).map_err(CliError::from_analysis)?;
            groups.push(GroupedReport {
                series: name.into(),
                grouped,
            });
        }
    }

    if let (Some(dir), Format::Csv) = (dir, args.output.format) {
        for (name, xs, ys) in &pair_files {
            let rows = xs.iter().zip(ys).map(|(&x, &y)| PairRow { x, y });
            write_csv(&dir.join(name), rows)?;
        }
        for g in &groups {
            let suffix = match g.grouped.granularity {
                Granularity::Month => "month",
                Granularity::HourOfDay => "hour",
            };
            let path = dir.join(format!("groups_{}_{suffix}.csv", g.series));
            let rows = g.grouped.groups.iter().map(|r| GroupRow {
                group: r.key.to_string(),
                mean: r.mean,
                min: r.min,
                max: r.max,
                count: r.count,
            });
            write_csv(&path, rows)?;
        }
    }

    let report = CorrelateReport {
        schema: SCHEMA,
        command: "correlate",
        tool_version: TOOL_VERSION,
        dataset: Fingerprint::of(ds),
        parameters: CorrelateParameters {
            k,
            round: order,
            aux: aux.iter().map(|(path, _)| path.display().to_string()).collect(),
            group: args
                .group
                .iter()
                .map(|g| match g {
                    GroupBy::Month => "month".to_string(),
                    GroupBy::Hour => "hour".to_string(),
                })
                .collect(),
            filters: selection.report.clone(),
            selected_starts,
        },
        correlations,
        groups,
        timing: ctx.timing(),
    };
    emit(&report, dir, "correlate.json")
}

pub fn match_cmd(args: &MatchArgs, ctx: &Ctx) -> CliResult<()> {
    let query = parse_values(&args.query)?;
    let order = single(parse_round_list(&args.round, args.allow_high_order)?, "rounding order")?;
    let dir = match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            Some(dir.as_path())
        }
        None => None,
    };
    let dataset = data::load(&args.input)?;
    with_dataset!(&dataset, ds => match_typed(ds, args, &query, order, dir, ctx))
}

fn match_typed<M: Measure>(
    ds: &Dataset<M>,
    args: &MatchArgs,
    query: &[u64],
    order: RoundingOrder,
    dir: Option<&Path>,
    ctx: &Ctx,
) -> CliResult<()> {
    let t = match (args.t, args.timestamp) {
        (Some(t), _) => t,
        (None, Some(ts)) => ds
            .grid()
            .index_of(ts)
            .ok_or_else(|| CliError::param(format!("timestamp {ts} is not on the dataset grid")))?,
        (None, None) => return Err(CliError::param("--t or --timestamp is required")),
    };
    let result = match_query(ds, t, query, order).map_err(CliError::from_analysis)?;
    let matched = !result.matches.is_empty();
    let report = MatchReport {
        schema: SCHEMA,
        command: "match",
        tool_version: TOOL_VERSION,
        dataset: Fingerprint::of(ds),
        timestamp: ds.timestamp(t),
        result,
        timing: ctx.timing(),
    };
    emit(&report, dir, "match.json")?;
    if matched {
        Ok(())
    } else {
        Err(CliError::NoMatch)
    }
}

fn synth_config(args: &GenerateArgs) -> CliResult<SynthConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(_), Some(_)) => return Err(CliError::param("--config and --preset are exclusive")),
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: invalid configuration: {e}", path.display())))?
        }
        (None, Some(name)) => {
            let preset: Preset = name.parse().map_err(|e: CoreError| CliError::param(e.to_string()))?;
            default_calibrated_config(preset)
        }
        (None, None) => SynthConfig::default(),
    };
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.m {
        cfg.m = v;
    }
    if let Some(v) = args.zero_prob {
        cfg.zero_prob = v;
    }
    if let Some(v) = args.missing_prob {
        cfg.missing_prob = v;
    }
    if let Some(v) = args.seasonal_amplitude {
        cfg.seasonal_amplitude = v;
    }
    if let Some(v) = args.start_epoch {
        cfg.start_epoch = v;
    }
    cfg.validate().map_err(|e| CliError::param(e.to_string()))?;
    Ok(cfg)
}

fn csv_target(out: &Path) -> CliResult<PathBuf> {
    if out.extension().is_some_and(|e| e == "csv") {
        if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        Ok(out.to_path_buf())
    } else {
        fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
        Ok(out.join("synthetic.csv"))
    }
}

pub fn generate(args: &GenerateArgs, ctx: &Ctx) -> CliResult<()> {
    let cfg = synth_config(args)?;
    let path = csv_target(&args.out)?;
    match width_for(cfg.domain_max) {
        Width::U16 => generate_typed::<u16>(cfg, &path, ctx),
        Width::U32 => generate_typed::<u32>(cfg, &path, ctx),
        Width::U64 => generate_typed::<u64>(cfg, &path, ctx),
    }
}

fn generate_typed<M: Measure>(cfg: SynthConfig, path: &Path, ctx: &Ctx) -> CliResult<()> {
    let ds: Dataset<M> = synth_generate(&cfg).map_err(|e| match e {
        CoreError::Config(m) => CliError::Param(m),
        other => CliError::Input(other.to_string()),
    })?;
    write_long_csv(&ds, path).map_err(CliError::from_input)?;
    // `None` when every cell is missing.
    let stats = summary::<M, f64>(&ds).ok().map(|s| GenerateSummary {
        mean: s.mean,
        std: s.std,
        zero_fraction: s.zero_fraction,
        missing_fraction: s.missing_fraction,
    });
    let report = GenerateReport {
        schema: SCHEMA,
        command: "generate",
        tool_version: TOOL_VERSION,
        dataset: Fingerprint::of(&ds),
        output: path.display().to_string(),
        sidecar: sidecar_path(path).display().to_string(),
        config: cfg,
        summary: stats,
        timing: ctx.timing(),
    };
    emit(&report, None, "")
}

use unitrace_core::dataset::Dataset;
use unitrace_core::io::{load_long_csv, sidecar_path, LoadOptions, Sidecar};
use unitrace_core::dataset::DEFAULT_DOMAIN_MAX;
use unitrace_core::{round_order, Measure, RoundingOrder};

use crate::args::InputArgs;
use crate::error::{CliError, CliResult};

/// A loaded dataset with the narrowest measure type fitting its domain.
pub enum AnyDataset {
    U16(Dataset<u16>),
    U32(Dataset<u32>),
    U64(Dataset<u64>),
}

/// Runs `$body` with `$ds` bound to the typed dataset inside `$any`.
macro_rules! with_dataset {
    ($any:expr, $ds:ident => $body:expr) => {
        match $any {
            $crate::data::AnyDataset::U16($ds) => $body,
            $crate::data::AnyDataset::U32($ds) => $body,
            $crate::data::AnyDataset::U64($ds) => $body,
        }
    };
}
pub(crate) use with_dataset;

/// Largest value any admissible rounding order can produce from `domain_max`.
fn rounded_ceiling(domain_max: u64) -> u64 {
    (0..=RoundingOrder::OVERRIDE_MAX)
        .map(|r| round_order(domain_max, RoundingOrder::with_override(r).expect("order in range")))
        .max()
        .unwrap_or(domain_max)
}

fn fits<M: Measure>(domain_max: u64) -> bool {
    M::narrow(rounded_ceiling(domain_max)).is_some()
}

pub enum Width {
    U16,
    U32,
    U64,
}

pub fn width_for(domain_max: u64) -> Width {
    if fits::<u16>(domain_max) {
        Width::U16
    } else if fits::<u32>(domain_max) {
        Width::U32
    } else {
        Width::U64
    }
}

pub fn load(args: &InputArgs) -> CliResult<AnyDataset> {
    let sidecar_file = args
        .meta
        .clone()
        .or_else(|| Some(sidecar_path(&args.input)).filter(|p| p.exists()));
    let declared = match (&args.domain_max, &sidecar_file) {
        (Some(d), _) => *d,
        (None, Some(path)) => Sidecar::read(path)
            .map_err(CliError::from_input)?
            .domain_max
            .unwrap_or(DEFAULT_DOMAIN_MAX),
        (None, None) => DEFAULT_DOMAIN_MAX,
    };
    let options = LoadOptions {
        sidecar: sidecar_file,
        domain_max: args.domain_max,
    };
    let loaded = match width_for(declared) {
        Width::U16 => load_long_csv(&args.input, &options).map(AnyDataset::U16),
        Width::U32 => load_long_csv(&args.input, &options).map(AnyDataset::U32),
        Width::U64 => load_long_csv(&args.input, &options).map(AnyDataset::U64),
    };
    loaded.map_err(CliError::from_input)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn narrowest_width() {
        assert!(matches!(width_for(36_000), Width::U16));
        assert!(matches!(width_for(65_535), Width::U32));
        assert!(matches!(width_for(1_000_000), Width::U32));
        assert!(matches!(width_for(u32::MAX as u64), Width::U64));
    }
}

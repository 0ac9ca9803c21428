//! Quadratic reference for window uniqueness.

use crate::dataset::{Dataset, WindowSpec};
use crate::degrade::{round_order, RoundingOrder};
use crate::engine::WindowUniqueness;
use crate::error::Result;
use crate::scalar::Measure;

/// Pairwise-comparison uniqueness of one window. A row is unique when no
/// other included row has an equal rounded window. Intended for small
/// populations only.
pub fn brute_force_uniqueness<M: Measure>(
    dataset: &Dataset<M>,
    spec: WindowSpec,
    order: RoundingOrder,
) -> Result<WindowUniqueness> {
    let window = dataset.window(spec)?;
    let rows: Vec<(&str, Vec<u64>)> = window
        .rows
        .iter()
        .map(|(id, values)| {
            let rounded = values
                .iter()
                .map(|v| round_order(v.widen(), order))
                .collect();
            (*id, rounded)
        })
        .collect();

    let mut unique_ids = Vec::new();
    for (i, (id, values)) in rows.iter().enumerate() {
        let collides = rows
            .iter()
            .enumerate()
            .any(|(j, (_, other))| i != j && other == values);
        if !collides {
            unique_ids.push(id.to_string());
        }
    }

    let included_count = rows.len();
    Ok(WindowUniqueness {
        spec,
        order,
        u: (included_count > 0).then(|| unique_ids.len() as f64 / included_count as f64),
        unique_count: unique_ids.len(),
        included_count,
        unique_ids,
    })
}

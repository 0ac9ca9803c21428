use proptest::prelude::*;
use unitrace_core::dataset::Dataset;
use unitrace_core::io::{content_hash, load_long_csv, read_long_csv, write_long_csv, write_long_csv_to, LoadOptions, Sidecar};
use unitrace_core::stats::{group_by_time, pearson};
use unitrace_core::{DatasetMeta, Granularity, TimeAxis, TimeGrid, TimeMapping, Unit};

fn dataset_strategy() -> impl Strategy<Value = Dataset<u16>> {
    (1usize..12, 1usize..10, 1u64..4000).prop_flat_map(|(n, m, step)| {
        let cell = prop_oneof![8 => (0u16..=36_000).prop_map(Some), 1 => Just(None)];
        proptest::collection::vec(proptest::collection::vec(cell, m), n).prop_map(move |vals| {
            let meta = DatasetMeta {
                unit: Unit::Wh,
                step_seconds: step,
                time_axis: TimeAxis::Epoch,
                ..DatasetMeta::default()
            };
            let rows = vals
                .into_iter()
                .enumerate()
                .map(|(i, v)| (format!("meter-{i}"), v))
                .collect();
            Dataset::from_rows(meta, TimeGrid::new(1_600_000_000, step, m).unwrap(), rows).unwrap()
        })
    })
}

fn to_csv(ds: &Dataset<u16>) -> String {
    let mut buf = Vec::new();
    write_long_csv_to(ds, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csv_round_trip(ds in dataset_strategy()) {
        let text = to_csv(&ds);
        let back: Dataset<u16> = read_long_csv(text.as_bytes(), &Sidecar::from_meta(ds.meta())).unwrap();
        prop_assert_eq!(&back, &ds);
        prop_assert_eq!(content_hash(&back), content_hash(&ds));
    }

    #[test]
    fn row_order_does_not_matter(ds in dataset_strategy(), seed in any::<u64>()) {
        let text = to_csv(&ds);
        let mut lines: Vec<&str> = text.lines().collect();
        let header = lines.remove(0);
        let len = lines.len();
        // Deterministic Fisher-Yates driven by a small LCG.
        let mut state = seed | 1;
        for i in (1..len).rev() {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            lines.swap(i, (state >> 33) as usize % (i + 1));
        }
        let shuffled = format!("{header}\n{}\n", lines.join("\n"));
        let back: Dataset<u16> = read_long_csv(shuffled.as_bytes(), &Sidecar::from_meta(ds.meta())).unwrap();
        prop_assert_eq!(content_hash(&back), content_hash(&ds));
        prop_assert_eq!(back, ds);
    }

    #[test]
    fn pearson_symmetry_and_affine_invariance(
        xy in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..60),
        a in 0.1f64..50.0,
        b in -100f64..100.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        if let Ok(r) = pearson(&x, &y) {
            prop_assert!((-1.0..=1.0).contains(&r));
            prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-12);
            let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert!((r - pearson(&scaled, &y).unwrap()).abs() < 1e-9);
            let flipped: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
            prop_assert!((r + pearson(&flipped, &y).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn grouping_preserves_count_and_total(
        points in proptest::collection::vec((0u64..(4 * 365 * 86_400), -50f64..50.0), 1..200),
        monthly in any::<bool>(),
    ) {
        let points: Vec<(u64, f64)> = points.into_iter().map(|(t, v)| (1_500_000_000 + t, v)).collect();
        let granularity = if monthly { Granularity::Month } else { Granularity::HourOfDay };
        let grouped = group_by_time(&points, granularity, &TimeMapping::epoch()).unwrap();
        let count: usize = grouped.groups.iter().map(|g| g.count).sum();
        prop_assert_eq!(count, points.len());
        let total: f64 = grouped.groups.iter().map(|g| g.mean * g.count as f64).sum();
        let direct: f64 = points.iter().map(|p| p.1).sum();
        prop_assert!((total - direct).abs() < 1e-6);
        for g in &grouped.groups {
            prop_assert!(g.min <= g.mean + 1e-9 && g.mean <= g.max + 1e-9);
        }
        prop_assert!(grouped.groups.windows(2).all(|w| w[0].key < w[1].key));
    }
}

#[test]
fn file_round_trip_uses_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let meta = DatasetMeta {
        unit: Unit::Wh,
        step_seconds: 86_400,
        domain_max: 90_000,
        time_axis: TimeAxis::Epoch,
    };
    let grid = TimeGrid::new(1_546_300_800, 86_400, 3).unwrap();
    let rows = vec![
        ("b".to_string(), vec![Some(70_000u32), None, Some(5)]),
        ("a".to_string(), vec![Some(1), Some(2), Some(3)]),
    ];
    let ds = Dataset::from_rows(meta, grid, rows).unwrap();
    let path = dir.path().join("daily.csv");
    write_long_csv(&ds, &path).unwrap();
    let back: Dataset<u32> = load_long_csv(&path, &LoadOptions::default()).unwrap();
    assert_eq!(back, ds);
    assert_eq!(back.meta().unit, Unit::Wh);
    // Without the sidecar the default domain rejects the large reading.
    std::fs::remove_file(dir.path().join("daily.meta.json")).unwrap();
    assert!(load_long_csv::<u32>(&path, &LoadOptions::default()).is_err());
    let opts = LoadOptions {
        domain_max: Some(90_000),
        ..LoadOptions::default()
    };
    assert_eq!(load_long_csv::<u32>(&path, &opts).unwrap().series_ids(), ds.series_ids());
}

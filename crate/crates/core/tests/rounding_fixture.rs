//! `round_order` against a table of SQL `ROUND(value, -order)` outputs.

use unitrace_core::{round_order, RoundingOrder};

#[test]
fn matches_sql_round_table() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/sql_round_reference.csv");
    let mut reader = csv::Reader::from_path(path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["value", "r0", "r1", "r2", "r3"]);
    let mut rows = 0u64;
    let mut mismatches = Vec::new();
    for record in reader.records() {
        let record = record.unwrap();
        let fields: Vec<u64> = record.iter().map(|f| f.parse().unwrap()).collect();
        let value = fields[0];
        assert_eq!(value, rows, "table must list every value in order");
        for order in 0..=3u8 {
            let got = round_order(value, RoundingOrder::new(order).unwrap());
            let want = fields[1 + order as usize];
            if got != want {
                mismatches.push((value, order, got, want));
            }
        }
        rows += 1;
    }
    assert_eq!(rows, 36_001);
    assert!(mismatches.is_empty(), "first mismatches: {:?}", &mismatches[..mismatches.len().min(10)]);
}

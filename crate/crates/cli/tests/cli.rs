mod common;

use common::*;
use serde_json::Value;
use tempfile::tempdir;

fn close(a: &Value, b: f64) -> bool {
    (a.as_f64().expect("number") - b).abs() < 1e-12
}

#[test]
fn audit_fixture_report() {
    let dir = tempdir().unwrap();
    let input = fixture(dir.path());
    let out = unitrace(["audit", input.to_str().unwrap(), "--k", "2,4", "--round", "0", "--entropy", "--ids"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_valid(&report);
    assert_eq!(report["schema"], "unitrace-report/v1");
    assert_eq!(report["dataset"]["n"], 4);
    assert_eq!(report["dataset"]["m"], 4);

    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    let k2 = &results[0];
    assert_eq!(k2["k"], 2);
    assert!(close(&k2["uniqueness"]["mean"], 1.0 / 6.0));
    assert!(close(&k2["uniqueness"]["min"], 0.0));
    assert!(close(&k2["uniqueness"]["max"], 0.25));
    assert_eq!(k2["uniqueness_per_t"][0]["unique_ids"], serde_json::json!(["D"]));
    assert!(close(&k2["entropy_per_t"][0]["e"], 0.811_278_124_459_132_9));

    let k4 = &results[1];
    assert!(close(&k4["uniqueness"]["mean"], 0.5));
    assert_eq!(k4["uniqueness_per_t"][0]["unique_ids"], serde_json::json!(["B", "D"]));
    assert!(close(&k4["entropy"]["mean"], 1.5));
}

#[test]
fn audit_is_repeatable() {
    let dir = tempdir().unwrap();
    let input = fixture(dir.path());
    let run = || {
        let out = unitrace(["audit", input.to_str().unwrap(), "--k", "1..4", "--round", "0,1", "--entropy"]);
        assert_eq!(code(&out), 0);
        String::from_utf8(out.stdout).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(without_timing(&a), without_timing(&b));
}

#[test]
fn audit_parameter_errors_exit_3() {
    let dir = tempdir().unwrap();
    let input = fixture(dir.path());
    let input = input.to_str().unwrap();
    for args in [
        vec!["audit", input, "--k", "99", "--round", "0"],
        vec!["audit", input, "--k", "0"],
        vec!["audit", input, "--k", "2", "--round", "4"],
        vec!["audit", input, "--k", "2", "--format", "csv"],
        vec!["audit", input, "--k", "2", "--hours", "25"],
        vec!["audit", input, "--k", "2", "--from", "tomorrow"],
        vec!["audit", input, "--bogus"],
        vec!["audit", input],
    ] {
        let out = unitrace(&args);
        assert_eq!(code(&out), 3, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = unitrace(["audit", input, "--k", "2", "--round", "4", "--allow-high-order"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempdir().unwrap();
    let cases = [
        ("bad_header.csv", "id,timestamp,value\nA,0,1\n"),
        ("negative.csv", "series_id,timestamp,value\nA,0,-1\n"),
        ("float.csv", "series_id,timestamp,value\nA,0,1.5\n"),
        ("duplicate.csv", "series_id,timestamp,value\nA,0,1\nA,0,2\n"),
        ("gappy_grid.csv", "series_id,timestamp,value\nA,0,1\nA,1,1\nA,3,1\n"),
        ("over_domain.csv", "series_id,timestamp,value\nA,0,36001\n"),
    ];
    for (name, text) in cases {
        let path = write_file(dir.path(), name, text);
        let out = unitrace(["audit", path.to_str().unwrap(), "--k", "1"]);
        assert_eq!(code(&out), 2, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = unitrace(["audit", "/nonexistent/data.csv", "--k", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn parse_errors_report_line_numbers() {
    let dir = tempdir().unwrap();
    let path = write_file(dir.path(), "bad.csv", "series_id,timestamp,value\nA,0,1\nA,1,x\n");
    let out = unitrace(["audit", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn audit_csv_outputs() {
    let dir = tempdir().unwrap();
    let input = fixture(dir.path());
    let out_dir = dir.path().join("out");
    let out = unitrace([
        "audit",
        input.to_str().unwrap(),
        "--k",
        "2",
        "--entropy",
        "--format",
        "csv",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let u = std::fs::read_to_string(out_dir.join("uniqueness_k2_r0.csv")).unwrap();
    assert_eq!(
        u,
        "t,u,unique_count,included_count\n0,0.25,1,4\n1,0.0,0,4\n2,0.25,1,4\n"
    );
    let e = std::fs::read_to_string(out_dir.join("entropy_k2_r0.csv")).unwrap();
    assert!(e.starts_with("t,e,class_count,included_count\n0,0.811278124459"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("audit.json")).unwrap()).unwrap();
    assert_valid(&report);
}

#[test]
fn time_filters_restrict_starts() {
    let dir = tempdir().unwrap();
    let input = fixture(dir.path());
    let out = unitrace(["audit", input.to_str().unwrap(), "--k", "2", "--from", "1", "--to", "3", "--per-t"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_valid(&report);
    assert_eq!(report["parameters"]["selected_starts"], 2);
    let ts: Vec<u64> = report["results"][0]["uniqueness_per_t"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["t"].as_u64().unwrap())
        .collect();
    assert_eq!(ts, vec![1, 2]);

    let out = unitrace(["audit", input.to_str().unwrap(), "--k", "2", "--from", "10"]);
    assert_eq!(code(&out), 3);
    // Calendar filters on index timestamps need an origin.
    let out = unitrace(["audit", input.to_str().unwrap(), "--k", "2", "--hours", "0-12"]);
    assert_eq!(code(&out), 3);
    let out = unitrace([
        "audit",
        input.to_str().unwrap(),
        "--k",
        "2",
        "--hours",
        "0-12",
        "--epoch-origin",
        "1546300800",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn sweep_writes_one_csv_per_order() {
    let dir = tempdir().unwrap();
    let input = fixture(dir.path());
    let out_dir = dir.path().join("sweep");
    let out = unitrace([
        "sweep",
        input.to_str().unwrap(),
        "--k",
        "1..3",
        "--round",
        "0,1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r0 = std::fs::read_to_string(out_dir.join("sweep_r0.csv")).unwrap();
    assert_eq!(
        r0,
        "k,mean_u,min_u,max_u\n1,0.125,0.0,0.25\n2,0.16666666666666666,0.0,0.25\n3,0.25,0.25,0.25\n"
    );
    let r1 = std::fs::read_to_string(out_dir.join("sweep_r1.csv")).unwrap();
    assert!(r1.starts_with("k,mean_u,min_u,max_u\n1,"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("sweep.json")).unwrap()).unwrap();
    assert_valid(&report);
    assert_eq!(report["results"].as_array().unwrap().len(), 6);
}

#[test]
fn sweep_degenerate_population_is_never_unique() {
    let dir = tempdir().unwrap();
    let mut text = String::from("series_id,timestamp,value\n");
    for id in ["a", "b", "c"] {
        for t in 0..6 {
            text.push_str(&format!("{id},{t},{}\n", 100 + t));
        }
    }
    let input = write_file(dir.path(), "same.csv", &text);
    let out = unitrace(["sweep", input.to_str().unwrap(), "--k", "1..6"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_valid(&report);
    for cell in report["results"].as_array().unwrap() {
        assert_eq!(cell["uniqueness"]["mean"].as_f64(), Some(0.0));
    }
}

#[test]
fn sweep_empty_range_exits_3() {
    let dir = tempdir().unwrap();
    let input = fixture(dir.path());
    for k in ["5..3", "", "1,,2"] {
        let out = unitrace(["sweep", input.to_str().unwrap(), "--k", k]);
        assert_eq!(code(&out), 3, "k = {k:?}");
    }
}

#[test]
fn match_outcomes() {
    let dir = tempdir().unwrap();
    let input = fixture(dir.path());
    let input = input.to_str().unwrap();

    let out = unitrace(["match", input, "--t", "0", "--query", "0,2"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_valid(&report);
    assert_eq!(report["matches"], serde_json::json!(["D"]));
    assert_eq!(report["is_unique"], true);

    let out = unitrace(["match", input, "--t", "2", "--query", "3,4"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["matches"], serde_json::json!(["A", "C", "D"]));
    assert_eq!(report["is_unique"], false);

    let out = unitrace(["match", input, "--timestamp", "2", "--query", "4,4", "--round", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["matches"], serde_json::json!(["A", "C", "D"]));

    let out = unitrace(["match", input, "--t", "0", "--query", "9,9"]);
    assert_eq!(code(&out), 5);
    assert_valid(&stdout_json(&out));

    let out = unitrace(["match", input, "--t", "3", "--query", "4,4"]);
    assert_eq!(code(&out), 3);
    let out = unitrace(["match", input, "--timestamp", "17", "--query", "4"]);
    assert_eq!(code(&out), 3);
    let out = unitrace(["match", input, "--t", "0", "--query", "1,x"]);
    assert_eq!(code(&out), 3);
}

fn index_dataset(values: &[[u32; 6]]) -> String {
    let mut text = String::from("series_id,timestamp,value\n");
    for (i, row) in values.iter().enumerate() {
        for (t, v) in row.iter().enumerate() {
            text.push_str(&format!("s{i},{t},{v}\n"));
        }
    }
    text
}

#[test]
fn correlate_colinear_aux_gives_one() {
    let dir = tempdir().unwrap();
    // Uniqueness at k=1 is 0, 1/3, 1, 1, 1, 1/3 by construction.
    let text = index_dataset(&[[5, 5, 5, 5, 5, 5], [5, 6, 6, 6, 6, 6], [5, 5, 7, 7, 7, 5]]);
    let input = write_file(dir.path(), "pop.csv", &text);
    let aux = write_file(
        dir.path(),
        "signal.csv",
        "timestamp,value\n0,10\n1,13\n2,19\n3,19\n4,19\n5,13\n",
    );
    let out = unitrace([
        "correlate",
        input.to_str().unwrap(),
        "--k",
        "1",
        "--aux",
        aux.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_valid(&report);
    let row = report["correlations"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["x"] == "uniqueness" && c["y"] == "signal")
        .expect("uniqueness vs aux");
    assert!((row["r"].as_f64().unwrap() - 1.0).abs() < 1e-12, "{row}");
    assert_eq!(row["pairs"], 6);
}

#[test]
fn correlate_degenerate_gives_null() {
    let dir = tempdir().unwrap();
    let text = index_dataset(&[[5; 6], [5; 6]]);
    let input = write_file(dir.path(), "flat.csv", &text);
    let out = unitrace(["correlate", input.to_str().unwrap(), "--k", "1"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_valid(&report);
    for row in report["correlations"].as_array().unwrap() {
        assert!(row["r"].is_null());
        assert!(row["note"].is_string());
    }
}

#[test]
fn correlate_alignment_failure_exits_4() {
    let dir = tempdir().unwrap();
    let input = fixture(dir.path());
    let aux = write_file(dir.path(), "far.csv", "timestamp,value\n100,1\n101,2\n");
    let out = unitrace(["correlate", input.to_str().unwrap(), "--k", "1", "--aux", aux.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    let bad = write_file(dir.path(), "bad.csv", "time,value\n0,1\n");
    let out = unitrace(["correlate", input.to_str().unwrap(), "--k", "1", "--aux", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = unitrace(["correlate", input.to_str().unwrap(), "--k", "1,2"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn correlate_seasonal_consumption_against_inverse_temperature() {
    let dir = tempdir().unwrap();
    let config = write_file(
        dir.path(),
        "daily.json",
        r#"{"n": 300, "m": 365, "step_seconds": 86400, "base_profile": [1.0],
            "time_shift_max": 0, "seasonal_amplitude": 0.3, "seed": 7}"#,
    );
    let data = dir.path().join("daily.csv");
    let out = unitrace(["generate", "--config", config.to_str().unwrap(), "--out", data.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let generated = stdout_json(&out);
    assert_valid(&generated);

    let start = 1_546_300_800u64;
    let mut temp = String::from("timestamp,value\n");
    for d in 0..365u64 {
        let ts = start + d * 86_400;
        let phase = 2.0 * std::f64::consts::PI * ((ts as f64 - 946_684_800.0) / 86_400.0) / 365.25;
        temp.push_str(&format!("{ts},{}\n", 12.0 - 8.0 * phase.cos()));
    }
    let aux = write_file(dir.path(), "temperature.csv", &temp);
    let out_dir = dir.path().join("corr");
    let out = unitrace([
        "correlate",
        data.to_str().unwrap(),
        "--k",
        "1",
        "--aux",
        aux.to_str().unwrap(),
        "--group",
        "month",
        "--format",
        "csv",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("correlate.json")).unwrap()).unwrap();
    assert_valid(&report);
    let r = report["correlations"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["x"] == "mean_consumption" && c["y"] == "temperature")
        .unwrap()["r"]
        .as_f64()
        .unwrap();
    assert!(r < -0.5, "r = {r}");

    let months = std::fs::read_to_string(out_dir.join("groups_mean_consumption_month.csv")).unwrap();
    let lines: Vec<&str> = months.lines().collect();
    assert_eq!(lines[0], "group,mean,min,max,count");
    assert_eq!(lines.len(), 13);
    assert!(lines[1].starts_with("2019-01,"));
    let pairs = std::fs::read_to_string(out_dir.join("pairs_mean_consumption_vs_temperature.csv")).unwrap();
    assert_eq!(pairs.lines().next(), Some("x,y"));
    assert_eq!(pairs.lines().count(), 366);
}

#[test]
fn correlate_uniqueness_tracks_entropy_on_calibrated_data() {
    let dir = tempdir().unwrap();
    let data = dir.path().join("small.csv");
    let out = unitrace(["generate", "--preset", "small", "--m", "96", "--out", data.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let out = unitrace(["correlate", data.to_str().unwrap(), "--k", "3", "--group", "hour"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_valid(&report);
    let r = report["correlations"][0]["r"].as_f64().unwrap();
    assert_eq!(report["correlations"][0]["y"], "entropy");
    assert!(r > 0.5, "r = {r}");
    let hours = &report["groups"][0]["groups"];
    assert_eq!(hours.as_array().unwrap().len(), 24);
}

#[test]
fn generate_is_seed_deterministic() {
    let dir = tempdir().unwrap();
    let gen = |name: &str, seed: &str| {
        let path = dir.path().join(name);
        let out = unitrace([
            "generate",
            "--n",
            "50",
            "--m",
            "48",
            "--seed",
            seed,
            "--missing-prob",
            "0.05",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let report = stdout_json(&out);
        assert_valid(&report);
        (std::fs::read(&path).unwrap(), report)
    };
    let (a, ra) = gen("a.csv", "1");
    let (b, _) = gen("b.csv", "1");
    let (c, _) = gen("c.csv", "2");
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(ra["dataset"]["n"], 50);
    assert!(dir.path().join("a.meta.json").exists());

    // The generated file loads back with the same fingerprint.
    let path = dir.path().join("a.csv");
    let out = unitrace(["audit", path.to_str().unwrap(), "--k", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["dataset"], ra["dataset"]);
}

#[test]
fn generate_into_directory_and_bad_configs() {
    let dir = tempdir().unwrap();
    let target = dir.path().join("pop");
    let out = unitrace(["generate", "--n", "10", "--m", "48", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(target.join("synthetic.csv").exists());
    assert!(target.join("synthetic.meta.json").exists());

    let out = unitrace(["generate", "--n", "10", "--m", "48", "--zero-prob", "1.5", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let out = unitrace(["generate", "--preset", "huge", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let config = write_file(dir.path(), "broken.json", "{ not json");
    let out = unitrace(["generate", "--config", config.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&unitrace(["--help"])), 0);
    assert_eq!(code(&unitrace(["--version"])), 0);
    assert_eq!(code(&unitrace(["audit", "--help"])), 0);
    assert_eq!(code(&unitrace(["frobnicate"])), 3);
}

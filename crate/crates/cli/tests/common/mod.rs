#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub const FIXTURE: &str = "series_id,timestamp,value
A,0,1
A,1,2
A,2,3
A,3,4
B,0,1
B,1,2
B,2,3
B,3,5
C,0,1
C,1,2
C,2,3
C,3,4
D,0,0
D,1,2
D,2,3
D,3,4
";

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_unitrace")
}

pub fn unitrace<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(bin()).args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn fixture(dir: &Path) -> PathBuf {
    write_file(dir, "fixture.csv", FIXTURE)
}

/// Report text with the trailing timing block cut off.
pub fn without_timing(text: &str) -> &str {
    let at = text.find("\"timing\"").expect("report has a timing block");
    &text[..at]
}

pub fn validator() -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/unitrace-report-v1.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&schema).expect("schema compiles")
}

pub fn assert_valid(report: &Value) {
    let schema = validator();
    let messages: Vec<String> = match schema.validate(report) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    assert!(messages.is_empty(), "report violates the schema: {messages:?}\n{report:#}");
}

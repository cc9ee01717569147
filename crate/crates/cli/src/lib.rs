//! Library behind the `veq` binary: problem-file parsing, commands and the
//! scripted example reproductions.

pub mod commands;
pub mod problem;
pub mod repro;

use serde_json::Value;

/// Pretty JSON with a trailing newline; adds `generated_at` (Unix seconds)
/// unless `deterministic`.
pub fn render(mut report: Value, deterministic: bool) -> String {
    if !deterministic {
        if let Value::Object(map) = &mut report {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs());
            map.insert("generated_at".into(), Value::from(now));
        }
    }
    let mut s = serde_json::to_string_pretty(&report).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Exit code recorded in a report.
pub fn exit_code(report: &Value) -> i32 {
    report["exit_code"].as_i64().map_or(commands::EXIT_PARSE, |c| c as i32)
}

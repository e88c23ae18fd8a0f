//! Versioned encodings of run results: one JSON document per run, a flat
//! CSV of the check table, and a metadata sidecar for everything that is
//! allowed to differ between identical reruns (timestamps, durations).

use serde_json::{json, Number, Value};

use crate::probes::{CheckRow, Cmp};

/// Version stamp of the report layout.
pub const SCHEMA: u32 = 1;

fn num(v: f64) -> Value {
    // Non-finite values cannot ride in JSON numbers; spell them out
    // instead of poisoning the document.
    Number::from_f64(v).map(Value::Number).unwrap_or_else(|| Value::String(format!("{v}")))
}

fn row_json(r: &CheckRow) -> Value {
    json!({
        "name": &r.name,
        "n": r.n,
        "value": num(r.value),
        "tol": num(r.tol),
        "cmp": if r.cmp == Cmp::Le { "le" } else { "ge" },
        "pass": r.pass,
    })
}

/// The full report document. The config is echoed verbatim so a report
/// can be reproduced from itself. Deliberately no timestamps, durations,
/// or host facts in here: rerunning the same config must produce the same
/// bytes. The volatile parts live in the sidecar from [`meta`].
pub fn assemble(config: Value, checks: &[CheckRow], detail: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "config": config,
        "checks": checks.iter().map(row_json).collect::<Vec<_>>(),
        "detail": detail,
    })
}

pub fn to_json(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).unwrap_or_else(|_| "{}".into());
    s.push('\n');
    s
}

/// Flat check table, one line per row: name,N,value,tolerance,pass.
pub fn to_csv(checks: &[CheckRow]) -> String {
    let mut out = String::from("name,N,value,tolerance,pass\n");
    for r in checks {
        out.push_str(&format!("{},{},{:e},{:e},{}\n", r.name, r.n, r.value, r.tol, r.pass));
    }
    out
}

/// Sidecar content: the facts of a run that are allowed to vary between
/// identical invocations. Written next to the report, never inside it.
pub fn meta(duration_ms: u128) -> Value {
    let unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "crate-version": env!("CARGO_PKG_VERSION"),
        "duration-ms": duration_ms as u64,
        "unix-time": unix,
    })
}

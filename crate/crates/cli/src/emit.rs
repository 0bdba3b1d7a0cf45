//! Report rendering and JSON-lines diagnostics.

use std::io::Write;
use std::path::Path;

use finsler_core::report::{CheckReport, Verdict};
use serde_json::{json, Value};

use crate::args::Format;

/// One JSON object per line on standard error.
pub fn diag(level: &str, event: &str, fields: Value) {
    let mut obj = json!({"level": level, "event": event});
    if let (Some(o), Value::Object(extra)) = (obj.as_object_mut(), fields) {
        o.extend(extra);
    }
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{obj}");
}

pub fn report_csv(r: &CheckReport) -> String {
    let mut out = String::from("section,key,value\n");
    out.push_str(&format!("meta,check,{}\n", r.check));
    out.push_str(&format!("meta,inputs,{}\n", r.inputs));
    out.push_str(&format!("meta,verdict,{}\n", r.verdict));
    for (k, v) in &r.values {
        out.push_str(&format!("value,{k},{v:.17e}\n"));
    }
    for (k, v) in &r.residuals {
        out.push_str(&format!("residual,{k},{v:.17e}\n"));
    }
    for (k, v) in &r.tolerances {
        out.push_str(&format!("tolerance,{k},{v:.17e}\n"));
    }
    for n in &r.notes {
        out.push_str(&format!("note,,\"{}\"\n", n.replace('"', "\"\"")));
    }
    out
}

pub fn render(r: &CheckReport, format: Format) -> Result<String, String> {
    match format {
        Format::Json => r.to_json().map(|s| s + "\n").map_err(|e| e.to_string()),
        Format::Csv => Ok(report_csv(r)),
    }
}

pub fn write_out(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

/// Emits the report diagnostic and returns the exit code of its verdict.
pub fn finish(r: &CheckReport) -> i32 {
    diag(
        "info",
        "report",
        json!({"check": r.check, "verdict": r.verdict.to_string(), "residuals": r.residuals, "tolerances": r.tolerances}),
    );
    match r.verdict {
        Verdict::Pass => 0,
        _ => 1,
    }
}

/// Re-judges residuals against a common tolerance. A failure that did not
/// come from a residual (e.g. a wrong integer) survives.
pub fn retolerate(r: CheckReport, tol: f64) -> CheckReport {
    let from_residuals = Verdict::all(r.residuals.iter().map(|(k, v)| Verdict::from_residual(*v, r.tolerances[k])));
    let structural = r.verdict == Verdict::Fail && from_residuals != Verdict::Fail;
    let mut out = r;
    for t in out.tolerances.values_mut() {
        *t = tol;
    }
    let v = Verdict::all(out.residuals.values().map(|v| Verdict::from_residual(*v, tol)));
    out.verdict = if structural { Verdict::Fail } else { v };
    out
}

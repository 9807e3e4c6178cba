use serde_json::{json, Map, Value};

/// Outcome of one named check. Only asserted checks affect the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub asserted: bool,
    pub passed: bool,
}

impl Check {
    pub fn asserted(name: &str, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            asserted: true,
            passed,
        }
    }

    pub fn reported(name: &str, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            asserted: false,
            passed,
        }
    }
}

/// Results of one verb before the report envelope is added.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.asserted && !c.passed)
    }
}

pub fn envelope(verb: &str, inputs: Value, outcome: Outcome, elapsed_ms: u64) -> Value {
    let failed = outcome.failed();
    let mut results = outcome.results;
    let checks: Vec<Value> = outcome
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "asserted": c.asserted, "passed": c.passed}))
        .collect();
    results.insert("checks".into(), Value::Array(checks));
    results.insert(
        "status".into(),
        Value::from(if failed { "check_failed" } else { "ok" }),
    );
    json!({
        "verb": verb,
        "inputs": inputs,
        "results": Value::Object(results),
        "versions": {
            "prosolv": env!("CARGO_PKG_VERSION"),
            "prosolv-core": prosolv_core::VERSION,
        },
        "timing": {"elapsed_ms": elapsed_ms},
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is plain JSON");
    s.push('\n');
    s
}

/// Report with the `timing` field removed, as used for golden comparison.
pub fn without_timing(report: &Value) -> Value {
    let mut r = report.clone();
    if let Value::Object(m) = &mut r {
        m.remove("timing");
    }
    r
}

pub fn to_text(report: &Value) -> String {
    let mut out = String::new();
    let verb = report["verb"].as_str().unwrap_or("?");
    let status = report["results"]["status"].as_str().unwrap_or("?");
    out.push_str(&format!("prosolv {verb}: {status}\n"));
    for section in ["inputs", "results"] {
        if let Some(m) = report[section].as_object() {
            for (k, v) in m {
                if section == "results" && (k == "checks" || k == "status") {
                    continue;
                }
                flatten(&mut out, k, v);
            }
        }
    }
    if let Some(checks) = report["results"]["checks"].as_array() {
        for c in checks {
            let mark = match (c["passed"].as_bool(), c["asserted"].as_bool()) {
                (Some(true), _) => "PASS",
                (_, Some(true)) => "FAIL",
                _ => "note",
            };
            out.push_str(&format!("[{mark}] {}\n", c["name"].as_str().unwrap_or("?")));
        }
    }
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(out: &mut String, path: &str, v: &Value) {
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{path}: {s}\n"));
        return;
    }
    match v {
        Value::Array(items) if items.iter().all(|i| scalar(i).is_some()) => {
            let parts: Vec<String> = items.iter().filter_map(scalar).collect();
            out.push_str(&format!("{path}: [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(out, &format!("{path}[{i}]"), item);
            }
        }
        Value::Object(m) => {
            for (k, item) in m {
                flatten(out, &format!("{path}.{k}"), item);
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_asserted_checks() {
        let mut o = Outcome::default();
        o.check(Check::reported("info", false));
        assert!(!o.failed());
        o.check(Check::asserted("claim", false));
        assert!(o.failed());
        let r = envelope("jacobi", json!({}), o, 3);
        assert_eq!(r["results"]["status"], "check_failed");
        assert!(without_timing(&r).get("timing").is_none());
    }

    #[test]
    fn text_lists_checks() {
        let mut o = Outcome::default();
        o.put("dims", vec![3, 1, 0]);
        o.check(Check::asserted("ok", true));
        let text = to_text(&envelope("series", json!({"N": 3}), o, 0));
        assert!(text.contains("dims: [3, 1, 0]"));
        assert!(text.contains("[PASS] ok"));
        assert!(text.contains("N: 3"));
    }
}

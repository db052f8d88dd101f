//! Machine-readable command output.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::problem::Units;

pub const RECORD_SCHEMA: u32 = 1;

/// One command's result. Identical inputs and seed give byte-identical
/// JSON apart from `wall_time_s`.
#[derive(Clone, Debug, Serialize)]
pub struct ResultRecord {
    pub schema: u32,
    pub command: String,
    pub tool_version: &'static str,
    /// SHA-256 of the problem file bytes and every flag that affects the result.
    pub inputs_digest: String,
    pub seed: u64,
    pub units: &'static str,
    pub values: BTreeMap<String, Value>,
    /// In `units`; absent for heuristics.
    pub duality_gap: Option<f64>,
    /// `certified`, `uncertified` or `HEURISTIC`, plus any warnings.
    pub flags: Vec<String>,
    pub wall_time_s: f64,
    pub diagnostics: BTreeMap<String, Value>,
}

impl ResultRecord {
    pub fn new(command: &str, digest: String, seed: u64, units: Units) -> Self {
        Self {
            schema: RECORD_SCHEMA,
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION"),
            inputs_digest: digest,
            seed,
            units: units.name(),
            values: BTreeMap::new(),
            duality_gap: None,
            flags: Vec::new(),
            wall_time_s: 0.0,
            diagnostics: BTreeMap::new(),
        }
    }

    /// Stores an information quantity given in nats, converted to `units`.
    pub fn info(&mut self, key: &str, nats: f64, units: Units) {
        self.values
            .insert(key.to_string(), number(units.convert(nats)));
    }

    /// Stores a dimensionless or energy-valued quantity unchanged.
    pub fn raw(&mut self, key: &str, v: f64) {
        self.values.insert(key.to_string(), number(v));
    }

    pub fn diagnostic(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).unwrap_or(Value::Null);
        self.diagnostics.insert(key.to_string(), v);
    }

    pub fn flag(&mut self, f: &str) {
        self.flags.push(f.to_string());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }
}

/// JSON has no infinities; they are written as strings.
fn number(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        Value::from("nan")
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

/// Hex SHA-256 over the file bytes followed by `key=value` lines.
pub fn inputs_digest(file: &[u8], settings: &[(&str, String)]) -> String {
    let mut h = Sha256::new();
    h.update(file);
    for (k, v) in settings {
        h.update(b"\n");
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
    }
    hex::encode(h.finalize())
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

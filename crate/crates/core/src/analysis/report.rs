use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::geometry::Grid;
use crate::{Error, Result};

/// Default tolerance per check name.
const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("lagrangian_defect", 1e-10),
    ("shrinker_residual", 1e-8),
    ("h_symmetry", 1e-8),
    ("grad_a_symmetry", 1e-6),
    ("mean_curvature_derivative", 1e-6),
    ("gauss_consistency", 1e-8),
    ("simons_identity", 1e-5),
    ("integral_2_minus_h2", 1e-6),
    ("integral_weighted_2_minus_x2", 1e-6),
    ("integral_gauss_k", 1e-6),
    ("a2_lower_bound", 1e-6),
    ("a2_upper_bound", 1e-6),
];

/// Named tolerances with overrides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(
            DEFAULT_TOLERANCES
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        )
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance for `{name}` must be finite and non-negative"
            )));
        }
        match self.0.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::InvalidParameter(format!("unknown check `{name}`"))),
        }
    }

    /// Raises every tolerance to at least `floor`.
    pub fn relaxed(mut self, floor: f64) -> Self {
        self.0.values_mut().for_each(|t| *t = t.max(floor));
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    /// Residual (or signed bound violation); the check passes iff `value <= tolerance`.
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Outcome of one identity suite run on a chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub label: String,
    pub grid: Grid,
    pub entries: Vec<CheckEntry>,
    /// What each check asserts.
    pub provenance: BTreeMap<String, String>,
    /// Informational extremes and signed integrals.
    pub stats: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn new(label: impl Into<String>, grid: Grid) -> Self {
        CheckReport {
            label: label.into(),
            grid,
            entries: Vec::new(),
            provenance: BTreeMap::new(),
            stats: BTreeMap::new(),
        }
    }

    pub fn check(&mut self, name: &str, value: f64, tolerance: f64, what: &str) {
        self.entries.push(CheckEntry {
            name: name.to_string(),
            value,
            tolerance,
            pass: value <= tolerance,
        });
        self.provenance.insert(name.to_string(), what.to_string());
    }

    pub fn stat(&mut self, name: &str, value: f64) {
        self.stats.insert(name.to_string(), value);
    }

    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.entries.extend(other.entries);
        self.provenance.extend(other.provenance);
        self.stats.extend(other.stats);
    }

    fn to_value(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "value": e.value,
                    "tolerance": e.tolerance,
                    "pass": e.pass,
                })
            })
            .collect();
        json!({
            "label": self.label,
            "grid": [self.grid.nu, self.grid.nv],
            "all_pass": self.all_pass(),
            "entries": entries,
            "provenance": self.provenance,
            "stats": self.stats,
        })
    }

    /// Canonical JSON: object keys sorted, floats printed with 17 significant digits,
    /// non-finite floats as `null`, two-space indentation.
    pub fn to_canonical_json(&self) -> String {
        let mut out = String::new();
        write_canonical(&self.to_value(), 0, &mut out);
        out.push('\n');
        out
    }

    /// One row per entry: `label,name,value,tolerance,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,name,value,tolerance,pass\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                csv_field(&self.label),
                e.name,
                format_float(e.value),
                format_float(e.tolerance),
                e.pass
            );
        }
        out
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn write_canonical(value: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                let _ = write!(out, "{i}");
            } else if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_canonical(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_canonical(&map[key.as_str()], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

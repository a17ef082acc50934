//! Named scalar results with provenance, and their JSON/CSV renderings.

use crate::error::{Error, Result};
use serde_json::{json, Map, Value};

/// One named result: the value plus a provenance string naming the producing
/// operation and its inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricEntry {
    pub name: String,
    pub value: f64,
    pub provenance: String,
}

/// Ordered collection of named results. Names are unique within a report;
/// insertion order is preserved through serialization.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricReport {
    entries: Vec<MetricEntry>,
}

/// Output encodings understood by the runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::validation(format!(
                "unknown report format {other:?}, expected \"json\" or \"csv\""
            ))),
        }
    }
}

impl MetricReport {
    pub fn new() -> Self {
        MetricReport::default()
    }

    /// Appends an entry. Panics on a duplicate name: reports are built by
    /// library code and a collision is a programming error.
    pub fn push(&mut self, name: impl Into<String>, value: f64, provenance: impl Into<String>) {
        let name = name.into();
        assert!(
            self.get(&name).is_none(),
            "duplicate report entry name {name:?}"
        );
        self.entries.push(MetricEntry {
            name,
            value,
            provenance: provenance.into(),
        });
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.value)
    }

    pub fn provenance(&self, name: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.provenance.as_str())
    }

    pub fn entries(&self) -> &[MetricEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends every entry of `other` under `prefix.name`.
    pub fn absorb(&mut self, prefix: &str, other: MetricReport) {
        for e in other.entries {
            self.push(format!("{prefix}.{}", e.name), e.value, e.provenance);
        }
    }

    /// JSON object keyed by entry name, each value carrying `value` and
    /// `provenance`. Entry order is insertion order.
    pub fn to_json_value(&self) -> Value {
        let mut map = Map::new();
        for e in &self.entries {
            map.insert(
                e.name.clone(),
                json!({ "value": e.value, "provenance": e.provenance }),
            );
        }
        Value::Object(map)
    }

    /// CSV with header `name,value,provenance`; values print in the shortest
    /// decimal form that parses back to the identical double.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("name,value,provenance\n");
        for e in &self.entries {
            out.push_str(&csv_field(&e.name));
            out.push(',');
            out.push_str(&format_f64(e.value));
            out.push(',');
            out.push_str(&csv_field(&e.provenance));
            out.push('\n');
        }
        out
    }

    /// Encodes in the requested format.
    pub fn emit(&self, format: ReportFormat) -> Result<Vec<u8>> {
        match format {
            ReportFormat::Json => {
                let mut bytes = serde_json::to_vec_pretty(&self.to_json_value())
                    .map_err(|e| Error::numerical(format!("report serialization failed: {e}")))?;
                bytes.push(b'\n');
                Ok(bytes)
            }
            ReportFormat::Csv => Ok(self.to_csv_string().into_bytes()),
        }
    }
}

/// Shortest round-trip decimal rendering of a double.
pub fn format_f64(v: f64) -> String {
    let mut s = format!("{v}");
    // Keep a distinguishable float form so "1" round-trips as a float field.
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Rounds to one significant figure, the precision used when comparing
/// against published order-of-magnitude estimates. The result is the double
/// nearest to `d × 10^e`, matching the literal a reader would write.
pub fn round_to_one_significant(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let mut exp = v.abs().log10().floor() as i32;
    let mut digit = (v.abs() / 10f64.powi(exp)).round();
    if digit >= 10.0 {
        digit = 1.0;
        exp += 1;
    }
    // Powers of ten are exact integers up to 10^22, so the quotient form is
    // the correctly rounded value of d × 10^e.
    let magnitude = if exp.abs() <= 22 {
        if exp >= 0 {
            digit * 10f64.powi(exp)
        } else {
            digit / 10f64.powi(-exp)
        }
    } else {
        digit * 10f64.powi(exp)
    };
    magnitude.copysign(v)
}

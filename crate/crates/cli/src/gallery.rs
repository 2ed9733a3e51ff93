//! The curve gallery: a manifest of curves, fields and metrics with the
//! verdicts and residual bounds `verify` enforces.

use helixlab_core::{CurveSpec, Lemma32Outcome, ScalarField, SignatureMetric};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curves;
use crate::error::CliError;

pub const MANIFEST_JSON: &str = include_str!("../gallery.json");

pub const NAMED_CURVES: &[&str] = &["slant_e4", "slant_minkowski4", "w_curve5"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub frenet_residual: f64,
    pub orthonormality: f64,
    pub thm31_residual: f64,
    pub vn1_orthogonality: f64,
    pub axis_error: f64,
    pub lambda_n1: f64,
    pub cor32_residual: f64,
    /// Allowed error on pinned constants.
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub summary: String,
    pub verdict: String,
    pub identity: Lemma32Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slant_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signed_sum: Option<f64>,
}

fn default_samples() -> usize {
    201
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub name: String,
    pub metric: Vec<i64>,
    pub curve: Value,
    pub field: Value,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub expected: Expected,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub default_bounds: Bounds,
    pub entries: Vec<Entry>,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::input("gallery manifest", e))
    }

    pub fn builtin() -> Self {
        Self::parse(MANIFEST_JSON).expect("bundled gallery manifest is valid")
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn bounds_for(&self, entry: &Entry) -> Bounds {
        entry.bounds.unwrap_or(self.default_bounds)
    }
}

impl Entry {
    pub fn metric(&self) -> Result<SignatureMetric, CliError> {
        metric_from_signs(&self.metric)
    }

    pub fn curve(&self) -> Result<CurveSpec, CliError> {
        Ok(curve_from_value(&self.curve)?.with_label(&self.name))
    }

    pub fn field(&self, dim: usize) -> Result<ScalarField, CliError> {
        ScalarField::from_json(&self.field.to_string(), dim).map_err(|e| CliError::input("gallery field", e))
    }

    /// One-line description of the curve source.
    pub fn curve_description(&self) -> String {
        describe_curve(&self.curve)
    }

    pub fn field_description(&self) -> String {
        match (self.field.get("form").and_then(Value::as_str), self.field.get("df"), self.field.get("builtin")) {
            (Some("linear"), Some(df), _) => format!("linear df={}", compact_numbers(df)),
            (Some("analytic"), _, Some(Value::String(b))) => format!("analytic {b}"),
            _ => self.field.to_string(),
        }
    }
}

pub fn metric_from_signs(signs: &[i64]) -> Result<SignatureMetric, CliError> {
    let raw: Vec<i8> = signs
        .iter()
        .map(|&s| i8::try_from(s).map_err(|_| CliError::Input(format!("metric sign {s} is not ±1"))))
        .collect::<Result<_, _>>()?;
    SignatureMetric::new(raw).map_err(|e| CliError::input("metric", e))
}

pub fn signature_string(m: &SignatureMetric) -> String {
    let s: Vec<&str> = m.signs().iter().map(|&x| if x < 0 { "-" } else { "+" }).collect();
    format!("({})", s.join(","))
}

pub fn named_curve(name: &str) -> Option<Result<CurveSpec, CliError>> {
    let c = match name {
        "slant_e4" => curves::slant_e4(),
        "slant_minkowski4" => curves::slant_minkowski4(),
        "w_curve5" => curves::w_curve5(),
        _ => return None,
    };
    Some(c.map_err(CliError::from))
}

/// Accepts either `{"builtin": name}` or the closed-form curve schema.
pub fn curve_from_value(v: &Value) -> Result<CurveSpec, CliError> {
    if let Some(name) = v.get("builtin") {
        let name = name
            .as_str()
            .ok_or_else(|| CliError::Input("curve 'builtin' must be a string".into()))?;
        return named_curve(name).unwrap_or_else(|| Err(CliError::Input(format!("unknown builtin curve '{name}'"))));
    }
    CurveSpec::from_json(&v.to_string()).map_err(|e| CliError::input("curve", e))
}

fn compact_numbers(v: &Value) -> String {
    match v {
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(compact_numbers).collect();
            format!("({})", parts.join(","))
        }
        other => other.to_string(),
    }
}

fn describe_curve(v: &Value) -> String {
    if let Some(Value::String(name)) = v.get("builtin") {
        return format!("{name} (analytic jets)");
    }
    let family = v.get("family").and_then(Value::as_str).unwrap_or("?");
    let params = match v.get("params") {
        Some(Value::Object(map)) => map
            .iter()
            .map(|(k, x)| format!("{k}={}", compact_numbers(x)))
            .collect::<Vec<_>>()
            .join(", "),
        _ => String::new(),
    };
    let domain = match v.get("domain").and_then(Value::as_array) {
        Some(d) if d.len() == 2 => format!("[{}, {}]", d[0], d[1]),
        _ => "?".into(),
    };
    format!("{family}({params}) on {domain}")
}

/// Text printed by `helixlab gallery`.
pub fn listing(manifest: &Manifest) -> String {
    let mut out = String::from("gallery entries\n");
    for e in &manifest.entries {
        let sig = e
            .metric()
            .map(|m| signature_string(&m))
            .unwrap_or_else(|err| format!("<{err}>"));
        out.push_str(&format!("  {:<22} metric {sig}\n", e.name));
        out.push_str(&format!("  {:<22} curve  {}\n", "", e.curve_description()));
        out.push_str(&format!("  {:<22} field  {}\n", "", e.field_description()));
        out.push_str(&format!("  {:<22} expected: {}\n", "", e.expected.summary));
    }
    out.push_str("builtin fields\n");
    for (name, desc) in helixlab_core::BUILTIN_FIELDS {
        out.push_str(&format!("  {name:<22} {desc}\n"));
    }
    out
}

//! Reports and their deterministic JSON form.

use std::fmt::Write;

use proxipoint_core::relations::ClassReport;
use proxipoint_core::solvers::NestedFamily;
use proxipoint_core::{
    CertReport, ContractionType, DistanceCertificate, Point, ProximalInstance, ProximalPair, RelationClass,
    SolveResult, Tolerances, Uniqueness,
};
use serde::Serialize;
use serde_json::Value;

use crate::config::Scheme;

pub const TOOL_NAME: &str = "proxipoint";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Tool {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceSummary {
    pub metric: String,
    pub dim: usize,
    #[serde(rename = "G")]
    pub g: String,
    #[serde(rename = "H")]
    pub h: String,
    pub map: String,
    pub relation: String,
    pub class: RelationClass,
    pub contraction_type: ContractionType,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl InstanceSummary {
    pub fn new(inst: &ProximalInstance) -> Self {
        InstanceSummary {
            metric: format!("{:?}", inst.metric.kind),
            dim: inst.metric.dim,
            g: inst.g.to_string(),
            h: inst.h.to_string(),
            map: inst.map.to_string(),
            relation: inst.relation.to_string(),
            class: inst.relation.declared_class,
            contraction_type: inst.contraction,
            tolerances: inst.tolerances,
            seed: inst.seed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceSummary {
    pub value: f64,
    pub certificate: DistanceCertificate,
    #[serde(rename = "G0")]
    pub g0: Vec<Point>,
    #[serde(rename = "H0")]
    pub h0: Vec<Point>,
    pub resolution: f64,
}

impl DistanceSummary {
    pub fn new(pair: &ProximalPair) -> Self {
        DistanceSummary {
            value: pair.dist,
            certificate: pair.certificate.clone(),
            g0: pair.g0.clone(),
            h0: pair.h0.clone(),
            resolution: pair.resolution,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSummary {
    pub p: usize,
    pub members: usize,
    pub diameter: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySummary {
    pub resolution: f64,
    pub grid_size: usize,
    pub nested: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_holds: Option<bool>,
    pub levels: Vec<LevelSummary>,
}

impl FamilySummary {
    pub fn new(f: &NestedFamily) -> Self {
        FamilySummary {
            resolution: f.resolution,
            grid_size: f.grid.len(),
            nested: f.nested,
            bound_holds: f.bound_holds,
            levels: f
                .levels
                .iter()
                .map(|l| LevelSummary {
                    p: l.p,
                    members: l.members.len(),
                    diameter: l.diameter,
                    bound: l.bound,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub scheme: Scheme,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Point>,
    pub point: Point,
    pub residual: f64,
    pub iterations: usize,
    pub trace_length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_estimate: Option<f64>,
    pub unique: Uniqueness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySummary>,
}

impl SolveSummary {
    pub fn new(scheme: Scheme, x0: Option<Point>, r: &SolveResult, family: Option<&NestedFamily>) -> Self {
        SolveSummary {
            scheme,
            x0,
            point: r.point.clone(),
            residual: r.residual,
            iterations: r.iterations,
            trace_length: r.trace.len(),
            rate_estimate: r.rate_estimate,
            unique: r.unique.clone(),
            family: family.map(FamilySummary::new),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleCheck {
    pub expected: Vec<Point>,
    pub pass: bool,
    pub reasons: Vec<String>,
}

/// Output of every subcommand; absent sections are omitted.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub tool: Tool,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<DistanceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_report: Option<ClassReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cert_report: Option<CertReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<ExampleCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.into(),
            ..RunReport::default()
        }
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

/// 17 significant digits in exponent form.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with sorted keys and every float at 17 significant digits.
/// Non-finite floats become null.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("reports serialize to JSON");
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', 2 * n));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64 number")));
            } else {
                write!(out, "{n}").expect("writing to a String");
            }
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(2.0), "2.0000000000000000e0");
        let parsed: f64 = format_float(1.0 / 3.0).parse().unwrap();
        assert_eq!(parsed, 1.0 / 3.0);
    }

    #[test]
    fn keys_are_sorted() {
        let v = serde_json::json!({"b": 1, "a": [1.5, {"d": null, "c": true}]});
        let text = to_json_string(&v);
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(text.find("\"c\"").unwrap() < text.find("\"d\"").unwrap());
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }
}

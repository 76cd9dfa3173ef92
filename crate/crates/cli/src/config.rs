//! JSON instance configs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use proxipoint_core::engine::DEFAULT_CERT_QUADRUPLES;
use proxipoint_core::relations::{catalog_relation, DEFAULT_SEED};
use proxipoint_core::solvers::DEFAULT_MAX_ITER;
use proxipoint_core::{
    parse_map, parse_relation, ContractionType, Metric, MetricKind, Point, ProximalInstance, Region, RelationClass,
    Shape, Tolerances,
};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{CliError, Result};

/// A real number that may also be written "inf" or "-inf".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound(pub f64);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct BoundVisitor;
        impl Visitor<'_> for BoundVisitor {
            type Value = Bound;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Bound, E> {
                Ok(Bound(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Bound, E> {
                Ok(Bound(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Bound, E> {
                Ok(Bound(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Bound, E> {
                match v {
                    "inf" | "+inf" => Ok(Bound(f64::INFINITY)),
                    "-inf" => Ok(Bound(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(BoundVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub kind: MetricKind,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Interval { lo: Bound, hi: Bound },
    Box { bounds: Vec<(Bound, Bound)> },
    Segment { from: Vec<f64>, to: Vec<f64> },
    Finite { points: Vec<Vec<f64>> },
    Union { parts: Vec<ShapeConfig> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionConfig {
    #[serde(flatten)]
    pub shape: ShapeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default = "default_class")]
    pub class: RelationClass,
}

impl<'de> Deserialize<'de> for RegionConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut value = serde_json::Value::deserialize(d)?;
        let trunc_radius = match value.as_object_mut().and_then(|m| m.remove("trunc_radius")) {
            None => None,
            Some(v) => Some(
                v.as_f64()
                    .ok_or_else(|| de::Error::custom("trunc_radius must be a number"))?,
            ),
        };
        let shape = ShapeConfig::deserialize(value).map_err(de::Error::custom)?;
        Ok(RegionConfig { shape, trunc_radius })
    }
}

fn default_class() -> RelationClass {
    RelationClass::A
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    First,
    Second,
    Strong,
}

impl From<ContractionType> for Scheme {
    fn from(c: ContractionType) -> Self {
        match c {
            ContractionType::First => Scheme::First,
            ContractionType::Second => Scheme::Second,
            ContractionType::Strong => Scheme::Strong,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::First => "first",
            Scheme::Second => "second",
            Scheme::Strong => "strong",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feas: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cert: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

/// A point given as a list of coordinates or, in one dimension, a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointConfig {
    Scalar(f64),
    Coords(Vec<f64>),
}

impl PointConfig {
    pub fn to_point(&self) -> Point {
        match self {
            PointConfig::Scalar(x) => Point::scalar(*x),
            PointConfig::Coords(c) => Point::new(c.clone()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<PointConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadruples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<String>,
    #[serde(default)]
    pub format: TraceFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub metric: MetricConfig,
    #[serde(rename = "G")]
    pub g: RegionConfig,
    #[serde(rename = "H")]
    pub h: RegionConfig,
    pub map: String,
    pub relation: RelationConfig,
    pub contraction_type: ContractionType,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Everything a config specifies, compiled.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub instance: ProximalInstance,
    pub scheme: Scheme,
    pub x0: Option<Point>,
    pub max_iter: usize,
    pub p_max: usize,
    pub quadruples: usize,
    pub output: OutputConfig,
}

pub const DEFAULT_P_MAX: usize = 64;

fn shape(cfg: &ShapeConfig) -> Shape {
    match cfg {
        ShapeConfig::Interval { lo, hi } => Shape::Interval { lo: lo.0, hi: hi.0 },
        ShapeConfig::Box { bounds } => Shape::Box {
            bounds: bounds.iter().map(|(a, b)| (a.0, b.0)).collect(),
        },
        ShapeConfig::Segment { from, to } => Shape::Segment {
            from: Point::new(from.clone()),
            to: Point::new(to.clone()),
        },
        ShapeConfig::Finite { points } => Shape::FiniteSet {
            points: points.iter().cloned().map(Point::new).collect(),
        },
        ShapeConfig::Union { parts } => Shape::Union {
            parts: parts.iter().map(shape).collect(),
        },
    }
}

fn shape_config(s: &Shape) -> ShapeConfig {
    match s {
        Shape::Interval { lo, hi } => ShapeConfig::Interval {
            lo: Bound(*lo),
            hi: Bound(*hi),
        },
        Shape::Box { bounds } => ShapeConfig::Box {
            bounds: bounds.iter().map(|&(a, b)| (Bound(a), Bound(b))).collect(),
        },
        Shape::Segment { from, to } => ShapeConfig::Segment {
            from: from.coords().to_vec(),
            to: to.coords().to_vec(),
        },
        Shape::FiniteSet { points } => ShapeConfig::Finite {
            points: points.iter().map(|p| p.coords().to_vec()).collect(),
        },
        Shape::Union { parts } => ShapeConfig::Union {
            parts: parts.iter().map(shape_config).collect(),
        },
    }
}

fn region(key: &str, cfg: &RegionConfig, dim: usize) -> Result<Region> {
    let shape = shape(&cfg.shape);
    let built = match cfg.trunc_radius {
        Some(r) => Region::with_trunc_radius(shape, r),
        None => Region::new(shape),
    };
    let region = built.map_err(|e| CliError::schema(key, e.to_string()))?;
    if region.dim() != dim {
        return Err(CliError::schema(
            key,
            format!("region has dimension {} but metric.dim is {dim}", region.dim()),
        ));
    }
    Ok(region)
}

fn region_config(r: &Region) -> RegionConfig {
    RegionConfig {
        shape: shape_config(r.shape()),
        trunc_radius: (r.trunc_radius() != proxipoint_core::region::DEFAULT_TRUNC_RADIUS).then_some(r.trunc_radius()),
    }
}

fn positive(key: &str, v: Option<f64>, default: f64) -> Result<f64> {
    match v {
        None => Ok(default),
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(CliError::schema(key, format!("must be a positive number, got {x}"))),
    }
}

impl InstanceConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            CliError::schema(key, e.into_inner().to_string())
        })
    }

    /// Validate and compile into an instance plus solver settings.
    pub fn compile(&self) -> Result<LoadedConfig> {
        let dim = self.metric.dim;
        let metric = Metric::new(self.metric.kind, dim).map_err(|e| CliError::schema("metric.dim", e.to_string()))?;
        let g = region("G", &self.g, dim)?;
        let h = region("H", &self.h, dim)?;

        let map = parse_map(&self.map).map_err(|source| CliError::Syntax {
            key: "map".into(),
            source,
        })?;
        if map.output_dim() != dim {
            return Err(CliError::schema(
                "map",
                format!("map produces {} coordinates but metric.dim is {dim}", map.output_dim()),
            ));
        }
        if map.arity() > dim {
            return Err(CliError::schema(
                "map",
                format!("map reads {} coordinates but metric.dim is {dim}", map.arity()),
            ));
        }
        let map = if map.arity() < dim && dim <= 2 {
            map.with_arity(dim).map_err(|source| CliError::Syntax {
                key: "map".into(),
                source,
            })?
        } else {
            map
        };

        let rel = &self.relation;
        let relation = match (&rel.text, &rel.catalog) {
            (Some(text), None) => {
                if !rel.params.is_empty() {
                    return Err(CliError::schema("relation.params", "only valid with relation.catalog"));
                }
                parse_relation(text).map_err(|source| CliError::Syntax {
                    key: "relation.text".into(),
                    source,
                })?
            }
            (None, Some(name)) => {
                catalog_relation(name, &rel.params).map_err(|e| CliError::schema("relation.catalog", e.to_string()))?
            }
            _ => {
                return Err(CliError::schema(
                    "relation",
                    "exactly one of `text` or `catalog` is required",
                ))
            }
        }
        .with_class(rel.class);

        let defaults = Tolerances::default();
        let tol = self.solver.tolerances.clone().unwrap_or_default();
        let tolerances = Tolerances {
            feas: positive("solver.tolerances.feas", tol.feas, defaults.feas)?,
            residual: positive("solver.tolerances.residual", tol.residual, defaults.residual)?,
            cert: positive("solver.tolerances.cert", tol.cert, defaults.cert)?,
            step: positive("solver.tolerances.step", tol.step, defaults.step)?,
        };

        let instance = ProximalInstance::new(metric, g, h, map, relation, self.contraction_type)
            .map_err(|e| CliError::schema("map", e.to_string()))?
            .with_tolerances(tolerances)
            .with_seed(self.seed.unwrap_or(DEFAULT_SEED));

        let x0 = self.solver.x0.as_ref().map(PointConfig::to_point);
        if let Some(p) = &x0 {
            if p.dim() != dim {
                return Err(CliError::schema(
                    "solver.x0",
                    format!("x0 has {} coordinates but metric.dim is {dim}", p.dim()),
                ));
            }
        }
        let p_max = self.solver.p_max.unwrap_or(DEFAULT_P_MAX);
        if p_max == 0 {
            return Err(CliError::schema("solver.p_max", "must be at least 1"));
        }
        Ok(LoadedConfig {
            instance,
            scheme: self.solver.scheme.unwrap_or_else(|| self.contraction_type.into()),
            x0,
            max_iter: self.solver.max_iter.unwrap_or(DEFAULT_MAX_ITER),
            p_max,
            quadruples: self.solver.quadruples.unwrap_or(DEFAULT_CERT_QUADRUPLES),
            output: self.output.clone().unwrap_or_default(),
        })
    }

    /// Config describing an existing instance (solver settings left at their
    /// defaults).
    pub fn from_instance(inst: &ProximalInstance) -> Self {
        let t = inst.tolerances;
        InstanceConfig {
            metric: MetricConfig {
                kind: inst.metric.kind,
                dim: inst.metric.dim,
            },
            g: region_config(&inst.g),
            h: region_config(&inst.h),
            map: inst.map.to_string(),
            relation: RelationConfig {
                text: Some(inst.relation.to_string()),
                catalog: None,
                params: BTreeMap::new(),
                class: inst.relation.declared_class,
            },
            contraction_type: inst.contraction,
            solver: SolverConfig {
                tolerances: Some(TolerancesConfig {
                    feas: Some(t.feas),
                    residual: Some(t.residual),
                    cert: Some(t.cert),
                    step: Some(t.step),
                }),
                ..SolverConfig::default()
            },
            output: None,
            seed: Some(inst.seed),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }
}

pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    InstanceConfig::parse(text)?.compile()
}

/// Read, validate and compile a config file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<LoadedConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

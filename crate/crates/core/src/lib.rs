//! Numerical toolkit for best proximity points of non-self mappings
//! S: G → H under implicit contraction relations.
//!
//! The pieces, bottom up: metrics and regions ([`point`], [`region`],
//! [`distance`]), a small expression language for maps and relations
//! ([`dsl`]), a sampling classifier for relation classes ([`relations`]),
//! the proximal step and contraction certifier ([`engine`]) and the
//! iteration schemes ([`solvers`]).

pub mod distance;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod par;
pub mod point;
pub mod region;
pub mod relations;
pub mod solvers;

pub use distance::{distance_between_regions, DistanceCertificate, DistanceMethod, DistanceStrategy};
pub use dsl::{parse_map, parse_relation, MappingSpec, RelationClass, RelationExpr};
pub use engine::{
    certify_contraction, compute_proximal_pair, proximal_step, CertConfig, CertReport, CertVerdict, ContractionType,
    ProximalInstance, ProximalPair, Tolerances,
};
pub use error::{Error, Result};
pub use point::{Metric, MetricKind, Point};
pub use region::{Region, Shape};
pub use relations::{check_class_a, check_class_aprime, check_declared_class, ClassCheckConfig, ClassReport, Verdict};
pub use solvers::{
    check_uniqueness, estimate_rate, solve_first_kind, solve_second_kind, solve_strong, IterationTrace, NestedFamily,
    SolveResult, Uniqueness,
};

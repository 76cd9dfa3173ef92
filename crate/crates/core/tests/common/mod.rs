#![allow(dead_code)]

use proxipoint_core::{
    compute_proximal_pair, parse_map, parse_relation, ContractionType, Metric, MetricKind, Point, ProximalInstance,
    ProximalPair, Region, RelationClass, Shape,
};

pub fn interval(lo: f64, hi: f64) -> Region {
    Region::interval(lo, hi).unwrap()
}

pub fn square(lo0: f64, hi0: f64, lo1: f64, hi1: f64) -> Region {
    Region::boxed(vec![(lo0, hi0), (lo1, hi1)]).unwrap()
}

pub fn build(
    kind: MetricKind,
    g: Region,
    h: Region,
    map: &str,
    relation: &str,
    class: RelationClass,
    contraction: ContractionType,
) -> (ProximalInstance, ProximalPair) {
    let dim = g.dim();
    let map = parse_map(map).unwrap();
    let map = if map.arity() < dim {
        map.with_arity(dim).unwrap()
    } else {
        map
    };
    let rel = parse_relation(relation).unwrap().with_class(class);
    let inst = ProximalInstance::new(Metric::new(kind, dim).unwrap(), g, h, map, rel, contraction).unwrap();
    let pair = compute_proximal_pair(&inst).unwrap();
    (inst, pair)
}

pub fn basha() -> (ProximalInstance, ProximalPair) {
    build(
        MetricKind::L2,
        interval(2.0, f64::INFINITY),
        interval(f64::NEG_INFINITY, -1.0),
        "(2 - 3*x)/4",
        "0.75*max(r, s, t)",
        RelationClass::A,
        ContractionType::First,
    )
}

pub fn kannan() -> (ProximalInstance, ProximalPair) {
    build(
        MetricKind::L2,
        interval(6.0, 7.0),
        interval(2.0, 3.0),
        "9 - x",
        "(49/50)*max(s, t)",
        RelationClass::A,
        ContractionType::First,
    )
}

pub fn piecewise() -> (ProximalInstance, ProximalPair) {
    build(
        MetricKind::L2,
        interval(3.0, 5.0),
        interval(0.0, 1.0),
        "piece x in [3, 4]: 1; piece x in [4, 5]: 5 - x",
        "(1/3)*(s + t)",
        RelationClass::Aprime,
        ContractionType::First,
    )
}

pub fn l1_second() -> (ProximalInstance, ProximalPair) {
    build(
        MetricKind::L1,
        square(4.0, 5.0, 0.0, 1.0),
        square(0.0, 1.0, 0.0, 1.0),
        "(1, y/2)",
        "0.5*r + 0.2*(s + t)",
        RelationClass::A,
        ContractionType::Second,
    )
}

pub fn segment_union() -> (ProximalInstance, ProximalPair) {
    let g = Region::new(Shape::Union {
        parts: vec![
            Shape::Segment {
                from: Point::from([2.0, 0.0]),
                to: Point::from([2.0, 3.0]),
            },
            Shape::Segment {
                from: Point::from([0.0, 2.0]),
                to: Point::from([2.0, 2.0]),
            },
        ],
    })
    .unwrap();
    build(
        MetricKind::L1,
        g,
        square(0.0, 1.0, 0.0, 1.0),
        "(x/2, 0)",
        "(1/4)*(s + t)",
        RelationClass::Aprime,
        ContractionType::Second,
    )
}

pub fn two_interval() -> (ProximalInstance, ProximalPair) {
    let g = Region::new(Shape::Union {
        parts: vec![
            Shape::Interval { lo: -1.0, hi: -0.5 },
            Shape::Interval { lo: 0.5, hi: 1.0 },
        ],
    })
    .unwrap();
    let h = Region::new(Shape::FiniteSet {
        points: vec![Point::scalar(0.0)],
    })
    .unwrap();
    build(
        MetricKind::L2,
        g,
        h,
        "0",
        "0.5*r",
        RelationClass::A,
        ContractionType::Second,
    )
}

pub fn strong() -> (ProximalInstance, ProximalPair) {
    build(
        MetricKind::L2,
        interval(0.0, 1.0),
        interval(5.0, 6.0),
        "6 - x",
        "(1/4)*(r + s + t)",
        RelationClass::A,
        ContractionType::Strong,
    )
}

mod common;

use common::*;
use proxipoint_core::relations::ClassCheckConfig;
use proxipoint_core::solvers::DEFAULT_MAX_ITER;
use proxipoint_core::{
    check_declared_class, check_uniqueness, estimate_rate, solve_first_kind, solve_second_kind, solve_strong, Error,
    Point, Uniqueness,
};

fn close(a: &Point, b: &Point, tol: f64) -> bool {
    a.coords().iter().zip(b.coords()).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn basha_first_kind() {
    let (inst, pair) = basha();
    let r = solve_first_kind(&inst, &pair, &Point::scalar(2.0), DEFAULT_MAX_ITER).unwrap();
    assert_eq!(r.point, Point::scalar(2.0));
    assert_eq!(r.residual, 0.0);
    assert_eq!(r.iterations, 1);
    assert_eq!(r.unique, Uniqueness::Unique);
    assert!(matches!(estimate_rate(&r.trace), Err(Error::TooShort { .. })));
}

#[test]
fn piecewise_and_kannan_first_kind() {
    let (inst, pair) = piecewise();
    let r = solve_first_kind(&inst, &pair, &Point::scalar(3.0), DEFAULT_MAX_ITER).unwrap();
    assert_eq!(r.point, Point::scalar(3.0));
    assert_eq!(r.unique, Uniqueness::Unique);

    let (inst, pair) = kannan();
    let r = solve_first_kind(&inst, &pair, &Point::scalar(6.0), DEFAULT_MAX_ITER).unwrap();
    assert_eq!(r.point, Point::scalar(6.0));
    assert_eq!(r.unique, Uniqueness::Unique);
}

#[test]
fn l1_trace_halves() {
    let (inst, pair) = l1_second();
    let r = solve_first_kind(&inst, &pair, &Point::from([4.0, 1.0]), DEFAULT_MAX_ITER).unwrap();
    assert!(close(&r.point, &Point::from([4.0, 0.0]), 1e-8));
    for (n, u) in r.trace.iterates.iter().enumerate() {
        assert_eq!(u[0], 4.0);
        assert_eq!(u[1], 0.5f64.powi(n as i32));
    }
    let rate = estimate_rate(&r.trace).unwrap();
    assert_eq!(rate.k_hat, 0.5);
    assert!(rate.bound_holds);
}

#[test]
fn first_and_second_kind_agree() {
    let (inst, pair) = l1_second();
    let x0 = Point::from([4.0, 1.0]);
    let a = solve_first_kind(&inst, &pair, &x0, DEFAULT_MAX_ITER).unwrap();
    let b = solve_second_kind(&inst, &pair, &x0, DEFAULT_MAX_ITER).unwrap();
    assert!(close(&a.point, &b.point, 1e-8));
    assert!(b.trace.image_steps.len() == b.trace.steps.len());
}

#[test]
fn segment_union_second_kind() {
    let (inst, pair) = segment_union();
    let r = solve_second_kind(&inst, &pair, &Point::from([2.0, 1.0]), DEFAULT_MAX_ITER).unwrap();
    assert_eq!(r.point, Point::from([2.0, 0.0]));
    assert_eq!(r.unique, Uniqueness::Unique);
}

#[test]
fn segment_union_horizontal_arm_is_infeasible() {
    let (inst, pair) = segment_union();
    let err = solve_second_kind(&inst, &pair, &Point::from([0.5, 2.0]), DEFAULT_MAX_ITER).unwrap_err();
    assert!(matches!(err, Error::NoFeasiblePoint { .. }), "{err:?}");
}

#[test]
fn two_interval_has_two_points() {
    let (inst, pair) = two_interval();
    let r = solve_second_kind(&inst, &pair, &Point::scalar(0.5), DEFAULT_MAX_ITER).unwrap();
    assert_eq!(r.point, Point::scalar(0.5));
    match r.unique {
        Uniqueness::Multiple(points) => {
            assert_eq!(points, vec![Point::scalar(-0.5), Point::scalar(0.5)]);
        }
        other => panic!("expected two points, got {other:?}"),
    }
}

#[test]
fn start_outside_g0() {
    let (inst, pair) = kannan();
    assert!(matches!(
        solve_first_kind(&inst, &pair, &Point::scalar(6.5), DEFAULT_MAX_ITER),
        Err(Error::StartNotProximal { .. })
    ));
}

#[test]
fn strong_family() {
    let (inst, pair) = strong();
    let class = check_declared_class(&inst.relation, &ClassCheckConfig::default()).unwrap();
    let (r, family) = solve_strong(&inst, &pair, 64, &class).unwrap();
    assert_eq!(r.point, Point::scalar(1.0));
    assert_eq!(r.unique, Uniqueness::Unique);
    assert!(family.nested);
    assert_eq!(family.bound_holds, Some(true));
    let level4 = &family.levels[3];
    assert_eq!(level4.p, 4);
    assert_eq!(family.members(3).next().unwrap(), &Point::scalar(0.5));
    assert_eq!(level4.diameter, 0.5);
    for level in &family.levels {
        let expected = (2.0 / level.p as f64).min(1.0);
        assert!((level.diameter - expected).abs() <= family.resolution);
        assert!(level.diameter <= 16.0 / (3.0 * level.p as f64) + family.resolution);
    }
}

#[test]
fn strong_needs_positive_distance() {
    let (mut inst, _) = strong();
    inst.h = interval(1.0, 2.0);
    inst.map = proxipoint_core::parse_map("2 - x").unwrap();
    let pair = proxipoint_core::compute_proximal_pair(&inst).unwrap();
    let class = check_declared_class(&inst.relation, &ClassCheckConfig::default()).unwrap();
    assert_eq!(solve_strong(&inst, &pair, 8, &class).unwrap_err(), Error::DistZero);
}

#[test]
fn uniqueness_scan() {
    let (inst, pair) = kannan();
    assert_eq!(
        check_uniqueness(&inst, &pair, &Point::scalar(6.0)).unwrap(),
        Uniqueness::Unique
    );
    let (inst, pair) = strong();
    assert_eq!(
        check_uniqueness(&inst, &pair, &Point::scalar(1.0)).unwrap(),
        Uniqueness::Unique
    );
}

#[test]
fn diverging_iteration() {
    // S(x) = 1 - 2x on G = H = [-1e6, 1e6]: dist 0, iterates x -> 1 - 2x expand
    let (inst, pair) = build(
        proxipoint_core::MetricKind::L2,
        interval(-1e6, 1e6),
        interval(-1e6, 1e6),
        "1/3 + (-2)*(x - 1/3)",
        "0.5*r",
        proxipoint_core::RelationClass::A,
        proxipoint_core::ContractionType::First,
    );
    let err = solve_first_kind(&inst, &pair, &Point::scalar(0.5), DEFAULT_MAX_ITER).unwrap_err();
    assert!(matches!(err, Error::Diverging { consecutive: 10, .. }), "{err:?}");
}

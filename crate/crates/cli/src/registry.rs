//! Worked examples shipped with the tool.

use proxipoint_core::Point;

#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    /// A single best proximity point.
    Point(Vec<f64>),
    /// Several best proximity points; the solver may return any of them.
    Multiple(Vec<Vec<f64>>),
}

impl Expected {
    pub fn points(&self) -> Vec<Point> {
        match self {
            Expected::Point(p) => vec![Point::new(p.clone())],
            Expected::Multiple(ps) => ps.iter().cloned().map(Point::new).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub config: &'static str,
    pub expected: Expected,
    /// Readings of the source that differ from its literal text.
    pub notes: &'static [&'static str],
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "basha-ex1",
            description: "G = [2, inf), H = (-inf, -1], S x = (2 - 3x)/4",
            config: include_str!("../fixtures/basha-ex1.json"),
            expected: Expected::Point(vec![2.0]),
            notes: &[],
        },
        Fixture {
            name: "kannan-ex",
            description: "G = [6, 7], H = [2, 3], S x = 9 - x, Kannan-type relation",
            config: include_str!("../fixtures/kannan-ex.json"),
            expected: Expected::Point(vec![6.0]),
            notes: &[],
        },
        Fixture {
            name: "piecewise-Aprime",
            description: "G = [3, 5], H = [0, 1], S piecewise (1 on [3, 4], 5 - x on [4, 5])",
            config: include_str!("../fixtures/piecewise-Aprime.json"),
            expected: Expected::Point(vec![3.0]),
            notes: &[],
        },
        Fixture {
            name: "l1-second-type",
            description: "L1 plane, G = [4, 5] x [0, 1], H = [0, 1]^2, S(x, y) = (1, y/2)",
            config: include_str!("../fixtures/l1-second-type.json"),
            expected: Expected::Point(vec![4.0, 0.0]),
            notes: &[],
        },
        Fixture {
            name: "segment-union",
            description: "L1 plane, G = two segments meeting at (2, 2), H = [0, 1]^2, S(x, y) = (x/2, 0)",
            config: include_str!("../fixtures/segment-union.json"),
            expected: Expected::Point(vec![2.0, 0.0]),
            notes: &[
                "the source states the best proximity point as (4, 0), which is not in G; (2, 0) is the only point of G with d(u, Su) = dist(G, H)",
                "points of G0 on the y = 2 arm have images outside H0, so iterations started there stop with NoFeasiblePoint",
            ],
        },
        Fixture {
            name: "two-interval",
            description: "G = [-1, -1/2] U [1/2, 1], H = {0}, S = 0",
            config: include_str!("../fixtures/two-interval.json"),
            expected: Expected::Multiple(vec![vec![-0.5], vec![0.5]]),
            notes: &["the source writes the right interval as [1/2, -1]; read as [1/2, 1], the symmetric set for which two best proximity points exist"],
        },
        Fixture {
            name: "strong-ex",
            description: "G = [0, 1], H = [5, 6], S x = 6 - x, strong contraction",
            config: include_str!("../fixtures/strong-ex.json"),
            expected: Expected::Point(vec![1.0]),
            notes: &["the slack term (gamma - 1) d(A, B) in the source is read as (gamma - 1) dist(G, H)"],
        },
    ]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}

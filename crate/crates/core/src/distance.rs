//! dist(G, H) with a witness pair.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::point::{Metric, Point};
use crate::region::Region;

/// Default start resolution for grid searches.
pub const GRID_START: f64 = 1.0 / 16.0;
/// Default number of refinement halvings.
pub const GRID_HALVINGS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistanceMethod {
    Analytic,
    Grid { resolution: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceCertificate {
    pub value: f64,
    pub witness_g: Point,
    pub witness_h: Point,
    pub method: DistanceMethod,
}

/// How [`distance_between_regions`] should compute the infimum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DistanceStrategy {
    /// Closed form per part pair (exact on every supported shape).
    #[default]
    Analytic,
    /// Brute force on a coarse grid, then `refine_steps` local halvings
    /// around the best pair.
    Refine { start_resolution: f64, refine_steps: u32 },
}

pub fn distance_between_regions(
    g: &Region,
    h: &Region,
    metric: &Metric,
    strategy: DistanceStrategy,
) -> Result<DistanceCertificate> {
    match strategy {
        DistanceStrategy::Analytic => {
            let np = g.nearest_pair(h, metric)?;
            Ok(DistanceCertificate {
                value: np.value,
                witness_g: np.witness_g,
                witness_h: np.witness_h,
                method: DistanceMethod::Analytic,
            })
        }
        DistanceStrategy::Refine {
            start_resolution,
            refine_steps,
        } => refined_grid_distance(g, h, metric, start_resolution, refine_steps),
    }
}

/// Pairwise budget for one brute-force round.
const PAIR_BUDGET: u128 = 8_000_000;

fn closest_pair(gs: &[Point], hs: &[Point], metric: &Metric) -> Option<(usize, usize, f64)> {
    let per_g = par::map(gs, |g| {
        hs.iter()
            .enumerate()
            .map(|(j, h)| (j, metric.dist(g.coords(), h.coords())))
            .fold(None, |best: Option<(usize, f64)>, (j, d)| match best {
                Some((_, bd)) if bd <= d => best,
                _ => Some((j, d)),
            })
    });
    per_g
        .into_iter()
        .enumerate()
        .filter_map(|(i, b)| b.map(|(j, d)| (i, j, d)))
        .fold(None, |best, cand| match best {
            Some((_, _, bd)) if bd <= cand.2 => best,
            _ => Some(cand),
        })
}

/// Nested grid refinement, independent of the closed forms: brute force on a
/// coarse grid of both truncated regions, then repeatedly halve the spacing
/// inside windows around the current best pair.
pub fn refined_grid_distance(
    g: &Region,
    h: &Region,
    metric: &Metric,
    start_resolution: f64,
    refine_steps: u32,
) -> Result<DistanceCertificate> {
    if g.dim() != h.dim() || metric.dim != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: metric.dim,
            found: if g.dim() != metric.dim { g.dim() } else { h.dim() },
        });
    }
    let mut res = start_resolution;
    while g.sample_count(res, g.trunc_radius()) * h.sample_count(res, h.trunc_radius()) > PAIR_BUDGET {
        res *= 2.0;
    }
    let gs = g.sample(res, g.trunc_radius())?;
    let hs = h.sample(res, h.trunc_radius())?;
    let (i, j, mut value) = closest_pair(&gs, &hs, metric).expect("nonempty samples");
    let (mut wg, mut wh) = (gs[i].clone(), hs[j].clone());
    // 9 points across a window of half-width 2·res give spacing res/2
    let per_axis = 9;
    for _ in 0..refine_steps {
        let half = 2.0 * res;
        let gw = g.sample_window(&wg, half, per_axis);
        let hw = h.sample_window(&wh, half, per_axis);
        if let Some((i, j, d)) = closest_pair(&gw, &hw, metric) {
            if d < value {
                value = d;
                wg = gw[i].clone();
                wh = hw[j].clone();
            }
        }
        res /= 2.0;
    }
    Ok(DistanceCertificate {
        value,
        witness_g: wg,
        witness_h: wh,
        method: DistanceMethod::Grid { resolution: res },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::MetricKind;
    use crate::region::Shape;

    const INF: f64 = f64::INFINITY;

    fn metric(kind: MetricKind, dim: usize) -> Metric {
        Metric::new(kind, dim).unwrap()
    }

    fn both(g: &Region, h: &Region, m: &Metric) -> (DistanceCertificate, DistanceCertificate) {
        let a = distance_between_regions(g, h, m, DistanceStrategy::Analytic).unwrap();
        let r = distance_between_regions(
            g,
            h,
            m,
            DistanceStrategy::Refine {
                start_resolution: GRID_START,
                refine_steps: GRID_HALVINGS,
            },
        )
        .unwrap();
        (a, r)
    }

    #[test]
    fn catalog_distances() {
        let l1 = metric(MetricKind::L1, 1);
        let cases = [
            (
                Region::interval(2.0, INF).unwrap(),
                Region::interval(-INF, -1.0).unwrap(),
                3.0,
            ),
            (
                Region::interval(6.0, 7.0).unwrap(),
                Region::interval(2.0, 3.0).unwrap(),
                3.0,
            ),
            (
                Region::interval(0.0, 1.0).unwrap(),
                Region::interval(5.0, 6.0).unwrap(),
                4.0,
            ),
        ];
        for (g, h, want) in cases {
            let (a, r) = both(&g, &h, &l1);
            assert_eq!(a.value, want);
            assert!((r.value - want).abs() <= 1e-6, "{} vs {want}", r.value);
            assert!(g.contains(&a.witness_g, &l1, 1e-9) && h.contains(&a.witness_h, &l1, 1e-9));
        }
        let l1 = metric(MetricKind::L1, 2);
        let g = Region::boxed(vec![(4.0, 5.0), (0.0, 1.0)]).unwrap();
        let h = Region::boxed(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let (a, r) = both(&g, &h, &l1);
        assert_eq!(a.value, 3.0);
        assert_eq!(r.value, 3.0);
    }

    #[test]
    fn symmetric_and_matches_grid_on_unions() {
        let g = Region::new(Shape::Union {
            parts: vec![
                Shape::Segment {
                    from: [2.0, 0.0].into(),
                    to: [2.0, 3.0].into(),
                },
                Shape::Segment {
                    from: [0.0, 2.0].into(),
                    to: [2.0, 2.0].into(),
                },
            ],
        })
        .unwrap();
        let h = Region::boxed(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        for kind in [MetricKind::L1, MetricKind::L2, MetricKind::Linf] {
            let m = metric(kind, 2);
            let (a, r) = both(&g, &h, &m);
            let (b, _) = both(&h, &g, &m);
            assert_eq!(a.value, b.value);
            assert_eq!(a.value, 1.0);
            assert!((r.value - a.value).abs() <= 1e-6);
        }
    }
}

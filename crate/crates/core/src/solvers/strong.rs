use serde::Serialize;

use crate::engine::{ProximalInstance, ProximalPair};
use crate::error::{Error, Result};
use crate::par;
use crate::point::{Metric, MetricKind, Point};
use crate::relations::ClassReport;

use super::rate::estimate_rate;
use super::uniqueness::{check_uniqueness, zoom};
use super::{IterationTrace, SolveResult};

const FAMILY_BUDGET: u128 = 1 << 14;
const FAMILY_FLOOR: f64 = 1.0 / (1u64 << 24) as f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyLevel {
    pub p: usize,
    /// Indices into [`NestedFamily::grid`].
    pub members: Vec<usize>,
    pub diameter: f64,
    /// dist(G,H)/((1 − α)p) + resolution, when α is known.
    pub bound: Option<f64>,
}

/// The sets Fₚ = {x ∈ G : d(x, Sx) ≤ (1 + 1/p)·dist(G,H)} on a common grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestedFamily {
    pub resolution: f64,
    #[serde(skip)]
    pub grid: Vec<Point>,
    pub levels: Vec<FamilyLevel>,
    /// Fₚ₊₁ ⊆ Fₚ held for every level.
    pub nested: bool,
    /// diam Fₚ ≤ bound held wherever a bound exists.
    pub bound_holds: Option<bool>,
}

impl NestedFamily {
    pub fn members(&self, level: usize) -> impl Iterator<Item = &Point> {
        self.levels[level].members.iter().map(|&i| &self.grid[i])
    }
}

fn diameter(points: &[&Point], metric: &Metric) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let dim = points[0].dim();
    let extent = |axis: usize| {
        let vals = points.iter().map(|p| p[axis]);
        vals.clone().fold(f64::NEG_INFINITY, f64::max) - vals.fold(f64::INFINITY, f64::min)
    };
    if dim == 1 {
        return extent(0);
    }
    match metric.kind {
        MetricKind::Linf => (0..dim).map(extent).fold(0.0, f64::max),
        MetricKind::L1 => (0..1usize << (dim - 1))
            .map(|signs| {
                let proj = |p: &Point| {
                    (0..dim)
                        .map(|a| {
                            if a > 0 && signs >> (a - 1) & 1 == 1 {
                                -p[a]
                            } else {
                                p[a]
                            }
                        })
                        .sum::<f64>()
                };
                let vals = points.iter().map(|p| proj(p));
                vals.clone().fold(f64::NEG_INFINITY, f64::max) - vals.fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max),
        MetricKind::L2 => {
            let hull = if dim == 2 { convex_hull(points) } else { points.to_vec() };
            let mut best = 0.0f64;
            for (i, a) in hull.iter().enumerate() {
                for b in &hull[i + 1..] {
                    best = best.max(metric.dist(a.coords(), b.coords()));
                }
            }
            best
        }
    }
}

fn convex_hull<'a>(points: &[&'a Point]) -> Vec<&'a Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    let cross = |o: &Point, a: &Point, b: &Point| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<&Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &&Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Build F₁ ⊇ F₂ ⊇ … ⊇ F_{p_max} on a grid of G and return the best
/// proximity point they shrink to.
///
/// The diameter bound uses α = `alpha_hat` from `class`; for 𝒜′ relations
/// there is no α and the bound is skipped. The point is the member of
/// F_{p_max} with the smallest residual, polished by a local zoom; the trace
/// follows the member nearest the centroid of each level.
pub fn solve_strong(
    inst: &ProximalInstance,
    pair: &ProximalPair,
    p_max: usize,
    class: &ClassReport,
) -> Result<(SolveResult, NestedFamily)> {
    if p_max < 1 {
        return Err(Error::InvalidArgument("p_max must be at least 1".into()));
    }
    let dist = pair.dist;
    let tol = inst.tolerances.feas;
    if dist <= tol {
        return Err(Error::DistZero);
    }
    let metric = inst.metric;
    let (resolution, grid) = inst
        .g
        .sample_within_budget(crate::distance::GRID_START, FAMILY_FLOOR, FAMILY_BUDGET)?;
    let displacement = par::map(&grid, |x| inst.displacement(x));
    let displacement: Vec<f64> = displacement.into_iter().collect::<Result<_>>()?;

    let alpha = class.alpha_hat.filter(|a| *a < 1.0);
    let mut levels: Vec<FamilyLevel> = Vec::with_capacity(p_max);
    let mut nested = true;
    for p in 1..=p_max {
        let limit = (1.0 + 1.0 / p as f64) * dist + tol;
        let members: Vec<usize> = (0..grid.len()).filter(|&i| displacement[i] <= limit).collect();
        if members.is_empty() {
            return Err(Error::SequenceMissing { p });
        }
        if let Some(prev) = levels.last() {
            nested &= members.iter().all(|i| prev.members.binary_search(i).is_ok());
        }
        let pts: Vec<&Point> = members.iter().map(|&i| &grid[i]).collect();
        levels.push(FamilyLevel {
            p,
            diameter: diameter(&pts, &metric),
            bound: alpha.map(|a| dist / ((1.0 - a) * p as f64) + resolution),
            members,
        });
    }
    let bound_holds = alpha.map(|_| levels.iter().all(|l| l.bound.is_none_or(|b| l.diameter <= b)));

    let score = |x: &Point| inst.displacement(x).map(|d| (d - dist).abs()).unwrap_or(f64::INFINITY);
    let mut trace = IterationTrace::default();
    for level in &levels {
        let dim = grid[0].dim();
        let n = level.members.len() as f64;
        let centroid: Vec<f64> = (0..dim)
            .map(|a| level.members.iter().map(|&i| grid[i][a]).sum::<f64>() / n)
            .collect();
        let nearest = level
            .members
            .iter()
            .copied()
            .min_by(|&a, &b| {
                metric
                    .dist(grid[a].coords(), &centroid)
                    .total_cmp(&metric.dist(grid[b].coords(), &centroid))
                    .then_with(|| grid[a].lex_cmp(&grid[b]))
            })
            .expect("levels are nonempty");
        let x = grid[nearest].clone();
        if let Some(last) = trace.iterates.last() {
            trace.steps.push(metric.dist(last.coords(), x.coords()));
        }
        trace.residuals.push((displacement[nearest] - dist).abs());
        trace.iterates.push(x);
    }

    let last = levels.last().expect("p_max ≥ 1");
    let start = last
        .members
        .iter()
        .copied()
        .min_by(|&a, &b| {
            displacement[a]
                .total_cmp(&displacement[b])
                .then_with(|| grid[a].lex_cmp(&grid[b]))
        })
        .expect("levels are nonempty");
    let (point, residual) = zoom(&inst.g, &grid[start], 2.0 * resolution, score);
    if residual > inst.tolerances.residual {
        return Err(Error::ResidualAboveTolerance {
            residual,
            tolerance: inst.tolerances.residual,
        });
    }
    let unique = check_uniqueness(inst, pair, &point)?;
    let rate_estimate = estimate_rate(&trace).ok().map(|r| r.k_hat);
    let result = SolveResult {
        point,
        residual,
        iterations: p_max,
        trace,
        rate_estimate,
        unique,
    };
    let family = NestedFamily {
        resolution,
        grid,
        levels,
        nested,
        bound_holds,
    };
    Ok((result, family))
}

use std::collections::HashMap;

use serde::Serialize;

use crate::engine::{ProximalInstance, ProximalPair};
use crate::error::Result;
use crate::par;
use crate::point::Point;
use crate::region::Region;

/// Grid budget for the uniqueness scan.
const SCAN_BUDGET: u128 = 1 << 16;
const SCAN_FLOOR: f64 = 1.0 / (1u64 << 24) as f64;
/// Halvings of the local zoom around a candidate cluster.
const ZOOM_ROUNDS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum Uniqueness {
    Unique,
    Multiple(Vec<Point>),
    Unknown,
}

/// Local minimization of `score` inside `region` near `start`, by repeated
/// window sampling with a shrinking half-width.
pub(crate) fn zoom<F>(region: &Region, start: &Point, half_width: f64, score: F) -> (Point, f64)
where
    F: Fn(&Point) -> f64,
{
    let mut best = start.clone();
    let mut best_score = score(start);
    let mut w = half_width;
    for _ in 0..ZOOM_ROUNDS {
        for p in region.sample_window(&best.clone(), w, 9) {
            let s = score(&p);
            if s < best_score {
                best = p;
                best_score = s;
            }
        }
        w /= 2.0;
    }
    (best, best_score)
}

fn chebyshev(a: &Point, b: &Point) -> f64 {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Single-linkage clusters of `members` (indices into `grid`) under the
/// Chebyshev distance `link`, in order of first member.
fn cluster(grid: &[Point], members: &[usize], link: f64) -> Vec<Vec<usize>> {
    let cell = |p: &Point| -> Vec<i64> { p.coords().iter().map(|c| (c / link).floor() as i64).collect() };
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (k, &i) in members.iter().enumerate() {
        cells.entry(cell(&grid[i])).or_default().push(k);
    }
    for (k, &i) in members.iter().enumerate() {
        let base = cell(&grid[i]);
        let dim = base.len();
        for code in 0..3usize.pow(dim as u32) {
            let mut key = base.clone();
            let mut c = code;
            for v in key.iter_mut() {
                *v += (c % 3) as i64 - 1;
                c /= 3;
            }
            if let Some(list) = cells.get(&key) {
                for &m in list {
                    if chebyshev(&grid[i], &grid[members[m]]) <= link {
                        let (a, b) = (root(&mut parent, k), root(&mut parent, m));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (k, &i) in members.iter().enumerate() {
        let r = root(&mut parent, k);
        let g = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

/// Scan G for other points with d(x, Sx) = dist(G,H).
///
/// Grid points whose residual is within a Lipschitz allowance of the
/// tolerance are clustered (linking at twice the grid spacing). Each cluster
/// is zoomed into; clusters that reach the residual tolerance count as best
/// proximity points, and a confirmed cluster wider than a few grid cells is
/// reported by its two extreme members.
pub fn check_uniqueness(inst: &ProximalInstance, pair: &ProximalPair, u: &Point) -> Result<Uniqueness> {
    let (res, grid) = inst
        .g
        .sample_within_budget(crate::distance::GRID_START, SCAN_FLOOR, SCAN_BUDGET)?;
    let tol = inst.tolerances.residual;
    let score = |p: &Point| {
        inst.displacement(p)
            .map(|d| (d - pair.dist).abs())
            .unwrap_or(f64::INFINITY)
    };
    let residuals = par::map(&grid, |p| score(p));

    // residual slope between lexicographic neighbours
    let mut lip: f64 = 1.0;
    for i in 1..grid.len() {
        let gap = chebyshev(&grid[i - 1], &grid[i]);
        if gap > 0.0 && gap <= 2.0 * res && residuals[i].is_finite() && residuals[i - 1].is_finite() {
            lip = lip.max((residuals[i] - residuals[i - 1]).abs() / gap);
        }
    }
    let threshold = tol + lip * res;

    let near: Vec<usize> = (0..grid.len()).filter(|&i| residuals[i] <= threshold).collect();
    let clusters = cluster(&grid, &near, 2.0 * res);

    let mut reps: Vec<Point> = Vec::new();
    let mut ambiguous = false;
    for c in &clusters {
        let start = c
            .iter()
            .copied()
            .min_by(|&a, &b| residuals[a].total_cmp(&residuals[b]))
            .expect("clusters are nonempty");
        let (p, s) = zoom(&inst.g, &grid[start], 2.0 * res, score);
        if s > tol {
            ambiguous |= residuals[start] <= tol;
            continue;
        }
        let confirmed: Vec<usize> = c.iter().copied().filter(|&i| residuals[i] <= tol).collect();
        let spread = (0..grid[start].dim())
            .map(|axis| {
                let vals = confirmed.iter().map(|&i| grid[i][axis]);
                vals.clone().fold(f64::NEG_INFINITY, f64::max) - vals.fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        if spread > 4.0 * res {
            let lo = confirmed.iter().min_by(|&&a, &&b| grid[a].lex_cmp(&grid[b])).unwrap();
            let hi = confirmed.iter().max_by(|&&a, &&b| grid[a].lex_cmp(&grid[b])).unwrap();
            reps.push(grid[*lo].clone());
            reps.push(grid[*hi].clone());
        } else {
            reps.push(p);
        }
    }

    let merge_radius = 2.0 * res;
    if !reps.iter().any(|r| chebyshev(r, u) <= merge_radius) {
        reps.push(u.clone());
    }
    reps.sort_by(|a, b| a.lex_cmp(b));
    reps.dedup_by(|a, b| chebyshev(a, b) <= merge_radius);

    Ok(match reps.len() {
        1 if !ambiguous => Uniqueness::Unique,
        1 => Uniqueness::Unknown,
        _ => Uniqueness::Multiple(reps),
    })
}

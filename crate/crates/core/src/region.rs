//! Closed subsets of ℝⁿ playing the roles of G and H.
//!
//! Every shape normalizes to a list of atoms: axis-aligned cells (intervals,
//! boxes, segments) and single points. Nearest points, set distances and
//! metric-ball sections are exact on atoms, so grids are only needed for
//! enumeration.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::point::{Metric, MetricKind, Point};

pub const DEFAULT_TRUNC_RADIUS: f64 = 100.0;

/// Grids larger than this are refused.
pub const MAX_GRID_POINTS: u128 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Closed interval of ℝ; at most one end may be infinite.
    Interval {
        lo: f64,
        hi: f64,
    },
    /// Product of closed intervals.
    Box {
        bounds: Vec<(f64, f64)>,
    },
    /// Axis-aligned closed segment.
    Segment {
        from: Point,
        to: Point,
    },
    FiniteSet {
        points: Vec<Point>,
    },
    Union {
        parts: Vec<Shape>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    fn truncated(&self, r: f64) -> Option<Axis> {
        let lo = self.lo.max(-r);
        let hi = self.hi.min(r);
        (lo <= hi).then_some(Axis { lo, hi })
    }

    fn intersect(&self, lo: f64, hi: f64) -> Option<Axis> {
        let lo = self.lo.max(lo);
        let hi = self.hi.min(hi);
        (lo <= hi).then_some(Axis { lo, hi })
    }

    /// Grid with spacing at most `h`, endpoints included.
    fn grid(&self, h: f64) -> Vec<f64> {
        let len = self.hi - self.lo;
        if len <= 0.0 {
            return vec![self.lo];
        }
        let m = ((len / h) - 1e-9).ceil().max(1.0) as usize;
        self.grid_n(m + 1)
    }

    /// `n >= 2` evenly spaced points including both ends (one point if degenerate).
    fn grid_n(&self, n: usize) -> Vec<f64> {
        if self.hi <= self.lo || n < 2 {
            return vec![self.lo];
        }
        let m = n - 1;
        let step = (self.hi - self.lo) / m as f64;
        let mut out: Vec<f64> = (0..m).map(|i| self.lo + i as f64 * step).collect();
        out.push(self.hi);
        out
    }

    fn grid_count(&self, h: f64) -> u128 {
        let len = self.hi - self.lo;
        if len <= 0.0 {
            1
        } else {
            ((len / h) - 1e-9).ceil().max(1.0) as u128 + 1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Atom {
    Cell(Vec<Axis>),
    Single(Point),
}

fn product(axes: &[Vec<f64>]) -> Vec<Point> {
    let total: usize = axes.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    if total == 0 {
        return out;
    }
    loop {
        out.push(Point::new(idx.iter().zip(axes).map(|(&i, a)| a[i]).collect()));
        let mut k = axes.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl Atom {
    fn project(&self, p: &[f64]) -> Point {
        match self {
            Atom::Cell(axes) => Point::new(axes.iter().zip(p).map(|(a, &x)| a.clamp(x)).collect()),
            Atom::Single(q) => q.clone(),
        }
    }

    fn in_cube(p: &Point, center: Option<&[f64]>, r: f64) -> bool {
        match center {
            None => p.coords().iter().all(|c| c.abs() <= r),
            Some(c) => p.coords().iter().zip(c).all(|(x, y)| (x - y).abs() <= r),
        }
    }

    fn sample(&self, h: f64, trunc: f64) -> Vec<Point> {
        match self {
            Atom::Cell(axes) => {
                let Some(cut) = axes.iter().map(|a| a.truncated(trunc)).collect::<Option<Vec<_>>>() else {
                    return Vec::new();
                };
                product(&cut.iter().map(|a| a.grid(h)).collect::<Vec<_>>())
            }
            Atom::Single(q) => {
                if Atom::in_cube(q, None, trunc) {
                    vec![q.clone()]
                } else {
                    Vec::new()
                }
            }
        }
    }

    fn sample_count(&self, h: f64, trunc: f64) -> u128 {
        match self {
            Atom::Cell(axes) => axes
                .iter()
                .map(|a| a.truncated(trunc).map_or(0, |t| t.grid_count(h)))
                .product(),
            Atom::Single(q) => Atom::in_cube(q, None, trunc) as u128,
        }
    }

    /// Grid of the atom inside the cube `center ± half_width`, `per_axis`
    /// points per nondegenerate axis.
    fn window(&self, center: &[f64], half_width: f64, per_axis: usize) -> Vec<Point> {
        match self {
            Atom::Cell(axes) => {
                let Some(cut) = axes
                    .iter()
                    .zip(center)
                    .map(|(a, &c)| a.intersect(c - half_width, c + half_width))
                    .collect::<Option<Vec<_>>>()
                else {
                    return Vec::new();
                };
                product(&cut.iter().map(|a| a.grid_n(per_axis)).collect::<Vec<_>>())
            }
            Atom::Single(q) => {
                if Atom::in_cube(q, Some(center), half_width) {
                    vec![q.clone()]
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// Points of the atom within `radius` of `center`, plus the nearest point
    /// pinned. Returns (pinned, others).
    fn ball_section(&self, center: &[f64], radius: f64, metric: &Metric, cap: usize) -> (Option<Point>, Vec<Point>) {
        match self {
            Atom::Single(q) => {
                if metric.dist(q.coords(), center) <= radius {
                    (Some(q.clone()), Vec::new())
                } else {
                    (None, Vec::new())
                }
            }
            Atom::Cell(axes) => {
                let nearest = self.project(center);
                if metric.dist(nearest.coords(), center) > radius {
                    return (None, Vec::new());
                }
                let Some(bbox) = axes
                    .iter()
                    .zip(center)
                    .map(|(a, &c)| a.intersect(c - radius, c + radius))
                    .collect::<Option<Vec<_>>>()
                else {
                    return (Some(nearest), Vec::new());
                };
                let free = bbox.iter().filter(|a| a.hi > a.lo).count();
                if free == 0 {
                    return (Some(nearest), Vec::new());
                }
                // the bounding box is the exact section in one dimension or under ℓ∞
                let exact = axes.len() == 1 || metric.kind == MetricKind::Linf;
                let budget = if exact { cap } else { 4 * cap } as f64;
                let per_axis = (budget.powf(1.0 / free as f64).floor() as usize).max(2);
                let grid = product(&bbox.iter().map(|a| a.grid_n(per_axis)).collect::<Vec<_>>());
                let others = if exact {
                    grid
                } else {
                    grid.into_iter()
                        .filter(|p| metric.dist(p.coords(), center) <= radius)
                        .collect()
                };
                (Some(nearest), others)
            }
        }
    }
}

fn sort_dedup(points: &mut Vec<Point>) {
    points.sort_by(|a, b| a.lex_cmp(b));
    points.dedup();
}

fn check_axis(lo: f64, hi: f64) -> Result<Axis> {
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::InvalidRegion("NaN bound".into()));
    }
    if lo > hi {
        return Err(Error::InvalidRegion(format!(
            "lower bound {lo} exceeds upper bound {hi}"
        )));
    }
    if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
        return Err(Error::InvalidRegion(format!("empty interval [{lo}, {hi}]")));
    }
    if lo.is_infinite() && hi.is_infinite() {
        return Err(Error::InvalidRegion(
            "at most one end of an interval may be infinite".into(),
        ));
    }
    Ok(Axis { lo, hi })
}

fn check_finite(p: &Point) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRegion(format!("non-finite point {p}")))
    }
}

fn atoms_of(shape: &Shape, out: &mut Vec<Atom>) -> Result<()> {
    match shape {
        Shape::Interval { lo, hi } => out.push(Atom::Cell(vec![check_axis(*lo, *hi)?])),
        Shape::Box { bounds } => {
            if bounds.is_empty() {
                return Err(Error::InvalidRegion("box needs at least one axis".into()));
            }
            let axes = bounds
                .iter()
                .map(|&(lo, hi)| check_axis(lo, hi))
                .collect::<Result<_>>()?;
            out.push(Atom::Cell(axes));
        }
        Shape::Segment { from, to } => {
            if from.dim() != to.dim() || from.dim() == 0 {
                return Err(Error::InvalidRegion("segment endpoints differ in dimension".into()));
            }
            check_finite(from)?;
            check_finite(to)?;
            let moving = from.coords().iter().zip(to.coords()).filter(|(a, b)| a != b).count();
            if moving > 1 {
                return Err(Error::InvalidRegion(format!("segment {from}-{to} is not axis-aligned")));
            }
            let axes = from
                .coords()
                .iter()
                .zip(to.coords())
                .map(|(&a, &b)| Axis {
                    lo: a.min(b),
                    hi: a.max(b),
                })
                .collect();
            out.push(Atom::Cell(axes));
        }
        Shape::FiniteSet { points } => {
            if points.is_empty() {
                return Err(Error::InvalidRegion("finite set is empty".into()));
            }
            for p in points {
                check_finite(p)?;
                out.push(Atom::Single(p.clone()));
            }
        }
        Shape::Union { parts } => {
            if parts.is_empty() {
                return Err(Error::InvalidRegion("union has no parts".into()));
            }
            for part in parts {
                atoms_of(part, out)?;
            }
        }
    }
    Ok(())
}

/// A nonempty closed subset of ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    shape: Shape,
    trunc_radius: f64,
    dim: usize,
    atoms: Vec<Atom>,
}

/// Exact nearest pair between two regions.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestPair {
    pub value: f64,
    pub witness_g: Point,
    pub witness_h: Point,
}

impl Region {
    pub fn new(shape: Shape) -> Result<Self> {
        Self::with_trunc_radius(shape, DEFAULT_TRUNC_RADIUS)
    }

    pub fn with_trunc_radius(shape: Shape, trunc_radius: f64) -> Result<Self> {
        if !(trunc_radius > 0.0 && trunc_radius.is_finite()) {
            return Err(Error::InvalidRegion(format!(
                "trunc_radius must be positive, got {trunc_radius}"
            )));
        }
        let mut atoms = Vec::new();
        atoms_of(&shape, &mut atoms)?;
        let dim = match &atoms[0] {
            Atom::Cell(a) => a.len(),
            Atom::Single(p) => p.dim(),
        };
        for atom in &atoms {
            let d = match atom {
                Atom::Cell(a) => a.len(),
                Atom::Single(p) => p.dim(),
            };
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d,
                });
            }
        }
        Ok(Region {
            shape,
            trunc_radius,
            dim,
            atoms,
        })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Shape::Interval { lo, hi })
    }

    pub fn boxed(bounds: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(Shape::Box { bounds })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc_radius(&self) -> f64 {
        self.trunc_radius
    }

    /// True when the region is a single cell (interval, box or segment).
    pub fn is_cell(&self) -> bool {
        matches!(self.atoms.as_slice(), [Atom::Cell(_)])
    }

    fn check(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        Ok(())
    }

    /// Nearest point of the region; ties between parts go to the
    /// lexicographically smallest candidate.
    pub fn project(&self, p: &Point, metric: &Metric) -> Result<Point> {
        self.check(p)?;
        metric.check(p)?;
        Ok(self.project_unchecked(p.coords(), metric).0)
    }

    pub(crate) fn project_unchecked(&self, p: &[f64], metric: &Metric) -> (Point, f64) {
        let mut best: Option<(Point, f64)> = None;
        for atom in &self.atoms {
            let q = atom.project(p);
            let d = metric.dist(q.coords(), p);
            let better = match &best {
                None => true,
                Some((bq, bd)) => d < *bd || (d == *bd && q.lex_cmp(bq) == Ordering::Less),
            };
            if better {
                best = Some((q, d));
            }
        }
        best.expect("regions have at least one atom")
    }

    /// Distance from a point to the region.
    pub fn distance_to(&self, p: &Point, metric: &Metric) -> Result<f64> {
        self.check(p)?;
        metric.check(p)?;
        Ok(self.project_unchecked(p.coords(), metric).1)
    }

    /// Membership within `tol` in the given metric.
    pub fn contains(&self, p: &Point, metric: &Metric, tol: f64) -> bool {
        if p.dim() != self.dim || p.dim() != metric.dim || !p.is_finite() {
            return false;
        }
        self.project_unchecked(p.coords(), metric).1 <= tol
    }

    fn axis_spacing(&self, resolution: f64) -> f64 {
        resolution * (2.0 / self.dim as f64).min(1.0)
    }

    /// Number of points [`Region::sample`] would return (before dedup).
    pub fn sample_count(&self, resolution: f64, trunc_radius: f64) -> u128 {
        let h = self.axis_spacing(resolution);
        self.atoms.iter().map(|a| a.sample_count(h, trunc_radius)).sum()
    }

    /// Grid over the region ∩ [−R, R]ⁿ, sorted lexicographically. Every
    /// region point inside the cube has a sample within `resolution` under
    /// any of the supported metrics.
    pub fn sample(&self, resolution: f64, trunc_radius: f64) -> Result<Vec<Point>> {
        if resolution.is_nan() || resolution <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        let count = self.sample_count(resolution, trunc_radius);
        if count > MAX_GRID_POINTS {
            return Err(Error::GridTooLarge { count });
        }
        let h = self.axis_spacing(resolution);
        let mut out: Vec<Point> = self.atoms.iter().flat_map(|a| a.sample(h, trunc_radius)).collect();
        if out.is_empty() {
            return Err(Error::EmptyAfterTruncation { trunc_radius });
        }
        sort_dedup(&mut out);
        Ok(out)
    }

    /// Finest dyadic refinement of `start` (down to `floor`) whose grid stays
    /// within `budget` points. Returns the resolution and the samples.
    pub fn sample_within_budget(&self, start: f64, floor: f64, budget: u128) -> Result<(f64, Vec<Point>)> {
        let mut res = start;
        while res / 2.0 >= floor && self.sample_count(res / 2.0, self.trunc_radius) <= budget {
            res /= 2.0;
        }
        Ok((res, self.sample(res, self.trunc_radius)?))
    }

    /// Grid of the region inside the cube `center ± half_width`, with
    /// `per_axis` points along each nondegenerate axis. May be empty.
    pub fn sample_window(&self, center: &Point, half_width: f64, per_axis: usize) -> Vec<Point> {
        let mut out: Vec<Point> = self
            .atoms
            .iter()
            .flat_map(|a| a.window(center.coords(), half_width, per_axis))
            .collect();
        sort_dedup(&mut out);
        out
    }

    /// Points of the region within `radius` of `center`: exact nearest points
    /// of every part that reaches the ball, plus an even sample of the rest,
    /// at most `cap` points in lexicographic order.
    pub fn ball_section(&self, center: &Point, radius: f64, metric: &Metric, cap: usize) -> Vec<Point> {
        let mut pinned = Vec::new();
        let mut others = Vec::new();
        for atom in &self.atoms {
            let (p, rest) = atom.ball_section(center.coords(), radius, metric, cap);
            pinned.extend(p);
            others.extend(rest);
        }
        sort_dedup(&mut pinned);
        sort_dedup(&mut others);
        others.retain(|p| pinned.binary_search_by(|q| q.lex_cmp(p)).is_err());
        let room = cap.saturating_sub(pinned.len());
        if others.len() > room {
            others = thin(others, room);
        }
        pinned.truncate(cap.max(1));
        pinned.extend(others);
        sort_dedup(&mut pinned);
        pinned
    }

    /// Exact distance between two regions, with the nearest pair. Ties go to
    /// the first atom pair in declaration order.
    pub fn nearest_pair(&self, other: &Region, metric: &Metric) -> Result<NearestPair> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if metric.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: metric.dim,
                found: self.dim,
            });
        }
        let mut best: Option<NearestPair> = None;
        for a in &self.atoms {
            for b in &other.atoms {
                let (wg, wh) = atom_pair(a, b);
                let value = metric.dist(wg.coords(), wh.coords());
                if best.as_ref().is_none_or(|bp| value < bp.value) {
                    best = Some(NearestPair {
                        value,
                        witness_g: wg,
                        witness_h: wh,
                    });
                }
            }
        }
        Ok(best.expect("regions have at least one atom"))
    }
}

fn thin(points: Vec<Point>, keep: usize) -> Vec<Point> {
    match keep {
        0 => Vec::new(),
        1 => vec![points[0].clone()],
        _ => {
            let last = points.len() - 1;
            (0..keep)
                .map(|i| points[(i * last + (keep - 1) / 2) / (keep - 1)].clone())
                .collect()
        }
    }
}

fn atom_pair(a: &Atom, b: &Atom) -> (Point, Point) {
    match (a, b) {
        (Atom::Cell(xa), Atom::Cell(xb)) => {
            let mut wa = Vec::with_capacity(xa.len());
            let mut wb = Vec::with_capacity(xa.len());
            for (p, q) in xa.iter().zip(xb) {
                if p.hi < q.lo {
                    wa.push(p.hi);
                    wb.push(q.lo);
                } else if q.hi < p.lo {
                    wa.push(p.lo);
                    wb.push(q.hi);
                } else {
                    let lo = p.lo.max(q.lo);
                    let hi = p.hi.min(q.hi);
                    let w = if lo.is_finite() {
                        lo
                    } else if hi.is_finite() {
                        hi
                    } else {
                        0.0
                    };
                    wa.push(w);
                    wb.push(w);
                }
            }
            (Point::new(wa), Point::new(wb))
        }
        (Atom::Cell(_), Atom::Single(q)) => (a.project(q.coords()), q.clone()),
        (Atom::Single(p), Atom::Cell(_)) => (p.clone(), b.project(p.coords())),
        (Atom::Single(p), Atom::Single(q)) => (p.clone(), q.clone()),
    }
}

fn fmt_bound(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn fmt_axis(f: &mut fmt::Formatter<'_>, lo: f64, hi: f64) -> fmt::Result {
    let open = if lo.is_infinite() { "(" } else { "[" };
    let close = if hi.is_infinite() { ")" } else { "]" };
    write!(f, "{open}{}, {}{close}", fmt_bound(lo), fmt_bound(hi))
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Interval { lo, hi } => fmt_axis(f, *lo, *hi),
            Shape::Box { bounds } => {
                for (i, &(lo, hi)) in bounds.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" x ")?;
                    }
                    fmt_axis(f, lo, hi)?;
                }
                Ok(())
            }
            Shape::Segment { from, to } => write!(f, "segment {from}-{to}"),
            Shape::FiniteSet { points } => {
                f.write_str("{")?;
                for (i, p) in points.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("}")
            }
            Shape::Union { parts } => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" U ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.shape.fmt(f)
    }
}

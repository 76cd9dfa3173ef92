use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn scalar(x: f64) -> Self {
        Point(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Lexicographic order on coordinates (total order on f64).
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point(vec![x])
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    L1,
    L2,
    Linf,
}

/// An ℓ1, ℓ2 or ℓ∞ metric on ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metric {
    pub kind: MetricKind,
    pub dim: usize,
}

impl Metric {
    pub fn new(kind: MetricKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("metric dimension must be at least 1".into()));
        }
        Ok(Metric { kind, dim })
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        Ok(())
    }

    /// Distance between two points of the metric's dimension.
    pub fn eval(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.dist(p.coords(), q.coords()))
    }

    /// Unchecked distance on raw coordinate slices of equal length.
    #[inline]
    pub fn dist(&self, p: &[f64], q: &[f64]) -> f64 {
        debug_assert_eq!(p.len(), q.len());
        let diffs = p.iter().zip(q).map(|(a, b)| (a - b).abs());
        match self.kind {
            MetricKind::L1 => diffs.sum(),
            MetricKind::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            MetricKind::Linf => diffs.fold(0.0, f64::max),
        }
    }

    /// Combine per-axis absolute gaps into a distance.
    #[inline]
    pub fn combine(&self, gaps: impl Iterator<Item = f64>) -> f64 {
        match self.kind {
            MetricKind::L1 => gaps.sum(),
            MetricKind::L2 => gaps.map(|d| d * d).sum::<f64>().sqrt(),
            MetricKind::Linf => gaps.fold(0.0, f64::max),
        }
    }
}

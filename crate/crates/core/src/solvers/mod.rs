//! Iteration schemes for best proximity points and their diagnostics.

mod iterate;
mod rate;
mod strong;
mod uniqueness;

use serde::Serialize;

use crate::point::Point;

pub use iterate::{solve_first_kind, solve_second_kind, DEFAULT_MAX_ITER};
pub use rate::{estimate_rate, RateEstimate};
pub use strong::{solve_strong, FamilyLevel, NestedFamily};
pub use uniqueness::{check_uniqueness, Uniqueness};

/// Expanding steps in a row after which an iteration is declared divergent.
pub const DIVERGENCE_RUN: usize = 10;

/// The sequence u₀, u₁, … produced by a solver.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IterationTrace {
    pub iterates: Vec<Point>,
    /// d(uₙ, uₙ₊₁)
    pub steps: Vec<f64>,
    /// d(Suₙ, Suₙ₊₁), second-kind iteration only.
    pub image_steps: Vec<f64>,
    /// |d(uₙ, Suₙ) − dist(G,H)|
    pub residuals: Vec<f64>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    /// Coordinates per iterate (0 for an empty trace).
    pub fn dim(&self) -> usize {
        self.iterates.first().map_or(0, Point::dim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub point: Point,
    /// |d(point, S point) − dist(G,H)|
    pub residual: f64,
    pub iterations: usize,
    pub trace: IterationTrace,
    pub rate_estimate: Option<f64>,
    pub unique: Uniqueness,
}

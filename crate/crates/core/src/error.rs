use thiserror::Error;

use crate::dsl::{EvalError, ParseError};
use crate::point::Point;

/// Errors raised by the proximity-point engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("region has no samples inside the truncation cube of radius {trunc_radius}")]
    EmptyAfterTruncation { trunc_radius: f64 },

    #[error("sampling grid too large ({count} points); raise the resolution")]
    GridTooLarge { count: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("unknown catalog relation `{0}`")]
    UnknownName(String),

    #[error("parameter `{name}` = {value} outside {range}")]
    ParamOutOfRange { name: String, value: f64, range: String },

    #[error("catalog relation `{relation}` requires parameter `{param}`")]
    MissingParam { relation: String, param: String },

    #[error("proximal set G0 is empty at the resolution floor")]
    EmptyProximalSet,

    #[error("point {point} is outside {region} (distance {distance:e})")]
    OutsideRegion {
        region: &'static str,
        point: Point,
        distance: f64,
    },

    #[error(
        "no point of G lies at distance dist(G,H) from {y} (deviation {deviation:e}); S(G0) is not inside H0 here"
    )]
    NoFeasiblePoint { y: Point, deviation: f64 },

    #[error("start point {x0} is not in G0 (deviation {deviation:e})")]
    StartNotProximal { x0: Point, deviation: f64 },

    #[error("iteration is expanding: step ratios exceeded 1 for {consecutive} consecutive steps ending at iteration {iteration}")]
    Diverging { iteration: usize, consecutive: usize },

    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    MaxIterExceeded { iterations: usize, last_step: f64 },

    #[error("iteration stopped with residual {residual:e} above tolerance {tolerance:e}")]
    ResidualAboveTolerance { residual: f64, tolerance: f64 },

    #[error("no tail iterate reaches residual tolerance {tolerance:e} (best {best:e})")]
    SubsequenceNotFound { best: f64, tolerance: f64 },

    #[error("F_{p} is empty at the resolution floor; no sequence with d(x_n, Sx_n) -> dist(G,H) was found")]
    SequenceMissing { p: usize },

    #[error("dist(G,H) is zero; the strong scheme needs a positive gap")]
    DistZero,

    #[error("trace has {nonzero} nonzero steps; at least 3 are needed")]
    TooShort { nonzero: usize },

    #[error("estimated rate {k_hat} is not below 1")]
    RateGeqOne { k_hat: f64 },
}

impl Error {
    /// True for failures that mean a theorem hypothesis does not hold on the
    /// instance (as opposed to usage or numerical trouble).
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(
            self,
            Error::EmptyProximalSet
                | Error::NoFeasiblePoint { .. }
                | Error::SequenceMissing { .. }
                | Error::StartNotProximal { .. }
                | Error::DistZero
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

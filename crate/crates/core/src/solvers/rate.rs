use serde::Serialize;

use crate::error::{Error, Result};

use super::IterationTrace;

/// Slack on the a-priori bound.
const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub k_hat: f64,
    /// Whether d(uₙ, u_final) ≤ k̂ⁿ/(1 − k̂) · d(u₀, u₁) held for every n.
    pub bound_holds: bool,
    /// Largest excess of the left side over the bound (≤ 0 when it holds).
    pub worst_excess: f64,
}

/// Contraction rate from the nonzero steps of a trace: the largest ratio
/// of consecutive steps over the last half.
///
/// The a-priori bound is checked with the tail sum of steps, which bounds
/// d(uₙ, u_final) from above, so a pass also holds for the true distance.
pub fn estimate_rate(trace: &IterationTrace) -> Result<RateEstimate> {
    let steps: Vec<f64> = trace.steps.iter().copied().take_while(|&s| s > 0.0).collect();
    if steps.len() < 3 {
        return Err(Error::TooShort { nonzero: steps.len() });
    }
    let ratios: Vec<f64> = steps.windows(2).map(|w| w[1] / w[0]).collect();
    let k_hat = ratios[ratios.len() / 2..].iter().copied().fold(0.0, f64::max);
    if k_hat >= 1.0 {
        return Err(Error::RateGeqOne { k_hat });
    }
    let first = trace.steps[0];
    let mut tail: f64 = trace.steps.iter().sum();
    let mut worst_excess = f64::NEG_INFINITY;
    for (n, s) in trace.steps.iter().enumerate() {
        let bound = k_hat.powi(n as i32) / (1.0 - k_hat) * first;
        worst_excess = worst_excess.max(tail - bound);
        tail -= s;
    }
    Ok(RateEstimate {
        k_hat,
        bound_holds: worst_excess <= BOUND_TOL,
        worst_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;

    fn trace(steps: &[f64]) -> IterationTrace {
        IterationTrace {
            iterates: (0..=steps.len()).map(|i| Point::scalar(i as f64)).collect(),
            steps: steps.to_vec(),
            image_steps: Vec::new(),
            residuals: vec![0.0; steps.len() + 1],
        }
    }

    #[test]
    fn halving_steps() {
        let steps: Vec<f64> = (1..30).map(|n| 0.5f64.powi(n)).collect();
        let r = estimate_rate(&trace(&steps)).unwrap();
        assert_eq!(r.k_hat, 0.5);
        assert!(r.bound_holds);
    }

    #[test]
    fn zero_steps_are_too_short() {
        assert_eq!(estimate_rate(&trace(&[0.0, 0.0])), Err(Error::TooShort { nonzero: 0 }));
        assert_eq!(estimate_rate(&trace(&[0.0])), Err(Error::TooShort { nonzero: 0 }));
    }

    #[test]
    fn growing_steps() {
        assert!(matches!(
            estimate_rate(&trace(&[1.0, 2.0, 4.0, 8.0])),
            Err(Error::RateGeqOne { .. })
        ));
    }
}

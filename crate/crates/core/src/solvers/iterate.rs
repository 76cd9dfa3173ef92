use crate::engine::{g0_deviation, proximal_step, ProximalInstance, ProximalPair};
use crate::error::{Error, Result};
use crate::point::Point;

use super::rate::estimate_rate;
use super::uniqueness::check_uniqueness;
use super::{IterationTrace, SolveResult, DIVERGENCE_RUN};

pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    First,
    Second,
}

fn residual(inst: &ProximalInstance, pair: &ProximalPair, p: &Point) -> Result<f64> {
    Ok((inst.displacement(p)? - pair.dist).abs())
}

fn check_start(inst: &ProximalInstance, pair: &ProximalPair, x0: &Point) -> Result<()> {
    inst.metric.check(x0)?;
    let to_g = inst.g.distance_to(x0, &inst.metric)?;
    let dev = g0_deviation(inst, pair, x0)?.max(to_g);
    if dev > inst.tolerances.feas {
        return Err(Error::StartNotProximal {
            x0: x0.clone(),
            deviation: dev,
        });
    }
    Ok(())
}

fn iterate(
    inst: &ProximalInstance,
    pair: &ProximalPair,
    x0: &Point,
    max_iter: usize,
    kind: Kind,
) -> Result<IterationTrace> {
    check_start(inst, pair, x0)?;
    let d = |a: &Point, b: &Point| inst.metric.dist(a.coords(), b.coords());
    let tol_step = inst.tolerances.step;

    let mut trace = IterationTrace::default();
    let mut u = x0.clone();
    let mut su = inst.apply(&u)?;
    trace.residuals.push((d(&u, &su) - pair.dist).abs());
    trace.iterates.push(u.clone());

    let mut expanding = 0;
    for n in 0..max_iter {
        let next = proximal_step(inst, pair, &su, Some(&u))?;
        let s_next = inst.apply(&next)?;
        let step = d(&u, &next);
        let monitored = match kind {
            Kind::First => step,
            Kind::Second => {
                let s = d(&su, &s_next);
                trace.image_steps.push(s);
                s
            }
        };
        let previous = match kind {
            Kind::First => trace.steps.last().copied(),
            Kind::Second => trace.image_steps.iter().rev().nth(1).copied(),
        };
        trace.steps.push(step);
        trace.residuals.push((d(&next, &s_next) - pair.dist).abs());
        trace.iterates.push(next.clone());

        expanding = match previous {
            Some(p) if monitored > p && monitored > tol_step => expanding + 1,
            _ => 0,
        };
        if expanding >= DIVERGENCE_RUN {
            return Err(Error::Diverging {
                iteration: n + 1,
                consecutive: expanding,
            });
        }
        if monitored <= tol_step {
            return Ok(trace);
        }
        u = next;
        su = s_next;
    }
    Err(Error::MaxIterExceeded {
        iterations: max_iter,
        last_step: trace.steps.last().copied().unwrap_or(0.0),
    })
}

fn finish(inst: &ProximalInstance, pair: &ProximalPair, point: Point, trace: IterationTrace) -> Result<SolveResult> {
    let residual = residual(inst, pair, &point)?;
    if residual > inst.tolerances.residual {
        return Err(Error::ResidualAboveTolerance {
            residual,
            tolerance: inst.tolerances.residual,
        });
    }
    let rate_estimate = estimate_rate(&trace).ok().map(|r| r.k_hat);
    let unique = check_uniqueness(inst, pair, &point)?;
    Ok(SolveResult {
        point,
        residual,
        iterations: trace.steps.len(),
        trace,
        rate_estimate,
        unique,
    })
}

/// Iterate uₙ₊₁ ∈ G with d(uₙ₊₁, Suₙ) = dist(G,H) from `x0` ∈ G₀ until the
/// step d(uₙ, uₙ₊₁) drops below the step tolerance.
pub fn solve_first_kind(
    inst: &ProximalInstance,
    pair: &ProximalPair,
    x0: &Point,
    max_iter: usize,
) -> Result<SolveResult> {
    let trace = iterate(inst, pair, x0, max_iter, Kind::First)?;
    let point = trace.iterates.last().expect("trace starts at x0").clone();
    finish(inst, pair, point, trace)
}

/// The same iteration, stopped on the image steps d(Suₙ, Suₙ₊₁). The point
/// returned is the tail iterate (last half of the trace) with the smallest
/// residual, later iterates winning ties.
pub fn solve_second_kind(
    inst: &ProximalInstance,
    pair: &ProximalPair,
    x0: &Point,
    max_iter: usize,
) -> Result<SolveResult> {
    let trace = iterate(inst, pair, x0, max_iter, Kind::Second)?;
    let tail = trace.len() / 2;
    let (best, best_res) =
        trace.residuals[tail..]
            .iter()
            .enumerate()
            .fold(
                (tail, f64::INFINITY),
                |(bi, br), (i, &r)| if r <= br { (tail + i, r) } else { (bi, br) },
            );
    if best_res > inst.tolerances.residual {
        return Err(Error::SubsequenceNotFound {
            best: best_res,
            tolerance: inst.tolerances.residual,
        });
    }
    let point = trace.iterates[best].clone();
    finish(inst, pair, point, trace)
}

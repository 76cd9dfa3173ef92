//! Proximal sets, the proximal step and the contraction certifier.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distance::{distance_between_regions, DistanceCertificate, DistanceStrategy, GRID_HALVINGS, GRID_START};
use crate::dsl::{MappingSpec, RelationClass, RelationExpr};
use crate::error::{Error, Result};
use crate::par;
use crate::point::{Metric, Point};
use crate::region::Region;
use crate::relations::DEFAULT_SEED;

/// Solutions of the proximal equation kept per point.
pub const SOLUTION_CAP: usize = 64;
/// γ values swept over [1, 2) for the strong definition.
pub const GAMMA_STEPS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Feasibility slack for d(u, Sx) = dist(G,H) and region membership.
    pub feas: f64,
    /// Required |d(u, Su) − dist(G,H)| for a solved point.
    pub residual: f64,
    /// Slack allowed on the contraction inequality.
    pub cert: f64,
    /// Step size that stops an iteration.
    pub step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feas: 1e-9,
            residual: 1e-6,
            cert: 1e-9,
            step: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionType {
    First,
    Second,
    Strong,
}

impl fmt::Display for ContractionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContractionType::First => "first",
            ContractionType::Second => "second",
            ContractionType::Strong => "strong",
        })
    }
}

/// One best-proximity problem: S: G → H with a contraction relation f.
#[derive(Debug, Clone)]
pub struct ProximalInstance {
    pub metric: Metric,
    pub g: Region,
    pub h: Region,
    pub map: MappingSpec,
    pub relation: RelationExpr,
    pub contraction: ContractionType,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl ProximalInstance {
    pub fn new(
        metric: Metric,
        g: Region,
        h: Region,
        map: MappingSpec,
        relation: RelationExpr,
        contraction: ContractionType,
    ) -> Result<Self> {
        for d in [g.dim(), h.dim(), map.output_dim()] {
            if d != metric.dim {
                return Err(Error::DimensionMismatch {
                    expected: metric.dim,
                    found: d,
                });
            }
        }
        if map.arity() > metric.dim {
            return Err(Error::DimensionMismatch {
                expected: metric.dim,
                found: map.arity(),
            });
        }
        Ok(ProximalInstance {
            metric,
            g,
            h,
            map,
            relation,
            contraction,
            tolerances: Tolerances::default(),
            seed: DEFAULT_SEED,
        })
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn class(&self) -> RelationClass {
        self.relation.declared_class
    }

    /// S(p).
    pub fn apply(&self, p: &Point) -> Result<Point> {
        Ok(self.map.eval(p)?)
    }

    /// d(p, Sp).
    pub fn displacement(&self, p: &Point) -> Result<f64> {
        let sp = self.apply(p)?;
        Ok(self.metric.dist(p.coords(), sp.coords()))
    }
}

/// dist(G,H) with sampled G₀ and H₀.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProximalPair {
    pub dist: f64,
    pub certificate: DistanceCertificate,
    pub g0: Vec<Point>,
    pub h0: Vec<Point>,
    pub resolution: f64,
}

/// Budget for the G₀/H₀ sample grids.
const PAIR_GRID_BUDGET: u128 = 1 << 16;

/// Grid at `res`, coarsened until it fits the budget.
pub(crate) fn budget_grid(region: &Region, res: f64, budget: u128) -> Result<(f64, Vec<Point>)> {
    let mut res = res;
    while region.sample_count(res, region.trunc_radius()) > budget {
        res *= 2.0;
    }
    Ok((res, region.sample(res, region.trunc_radius())?))
}

fn proximal_members(
    set: &Region,
    other: &Region,
    metric: &Metric,
    dist: f64,
    tol: f64,
    res: f64,
    witness: &Point,
) -> Result<Vec<Point>> {
    let (_, grid) = budget_grid(set, res, PAIR_GRID_BUDGET)?;
    let keep = par::map(&grid, |p| {
        (other.project_unchecked(p.coords(), metric).1 - dist).abs() <= tol
    });
    let mut out: Vec<Point> = grid.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect();
    if (other.project_unchecked(witness.coords(), metric).1 - dist).abs() <= tol {
        out.push(witness.clone());
    }
    out.sort_by(|a, b| a.lex_cmp(b));
    out.dedup();
    Ok(out)
}

/// dist(G,H), and the points of G and H that realize it, filtered from
/// sample grids (the exact nearest pair is always included).
pub fn compute_proximal_pair(inst: &ProximalInstance) -> Result<ProximalPair> {
    let certificate = distance_between_regions(&inst.g, &inst.h, &inst.metric, DistanceStrategy::Analytic)?;
    let dist = certificate.value;
    let tol = inst.tolerances.feas;
    let mut res = GRID_START;
    for _ in 0..=GRID_HALVINGS {
        let g0 = proximal_members(&inst.g, &inst.h, &inst.metric, dist, tol, res, &certificate.witness_g)?;
        let h0 = proximal_members(&inst.h, &inst.g, &inst.metric, dist, tol, res, &certificate.witness_h)?;
        if !g0.is_empty() && !h0.is_empty() {
            return Ok(ProximalPair {
                dist,
                certificate,
                g0,
                h0,
                resolution: res,
            });
        }
        res /= 2.0;
    }
    Err(Error::EmptyProximalSet)
}

/// |d(x, H) − dist(G,H)|: how far `x` is from qualifying for G₀.
pub fn g0_deviation(inst: &ProximalInstance, pair: &ProximalPair, x: &Point) -> Result<f64> {
    Ok((inst.h.distance_to(x, &inst.metric)? - pair.dist).abs())
}

/// Solve d(u, y) = dist(G,H) for u ∈ G.
///
/// Since d(u, y) ≥ d(y, G) ≥ dist(G,H), the solutions are exactly the
/// nearest points of G to y when d(y, G) = dist(G,H), and there are none
/// otherwise. Among several solutions the smallest deviation wins, then the
/// one closest to `prev`, then the lexicographically smallest.
pub fn proximal_step(inst: &ProximalInstance, pair: &ProximalPair, y: &Point, prev: Option<&Point>) -> Result<Point> {
    let metric = &inst.metric;
    let tol = inst.tolerances.feas;
    let to_h = inst.h.distance_to(y, metric)?;
    if to_h > tol {
        return Err(Error::OutsideRegion {
            region: "H",
            point: y.clone(),
            distance: to_h,
        });
    }
    let to_g = inst.g.distance_to(y, metric)?;
    if to_g - pair.dist > tol {
        return Err(Error::NoFeasiblePoint {
            y: y.clone(),
            deviation: to_g - pair.dist,
        });
    }
    let candidates = inst.g.ball_section(y, pair.dist + tol, metric, SOLUTION_CAP);
    let key = |u: &Point| {
        let dev = (metric.dist(u.coords(), y.coords()) - pair.dist).abs();
        let cont = prev.map_or(0.0, |p| metric.dist(u.coords(), p.coords()));
        (dev, cont)
    };
    candidates
        .into_iter()
        .map(|u| (key(&u), u))
        .min_by(|(ka, a), (kb, b)| {
            ka.0.total_cmp(&kb.0)
                .then(ka.1.total_cmp(&kb.1))
                .then_with(|| a.lex_cmp(b))
        })
        .map(|(_, u)| u)
        .ok_or(Error::NoFeasiblePoint {
            y: y.clone(),
            deviation: to_g - pair.dist,
        })
}

/// Default minimum number of quadruples per certification.
pub const DEFAULT_CERT_QUADRUPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertConfig {
    /// Minimum number of quadruples to check.
    pub n_quadruples: usize,
    /// Minimum number of (x₁, x₂) pairs, when that many are available.
    pub min_x_pairs: usize,
    /// Budget for the grid of x candidates.
    pub x_budget: u128,
}

impl Default for CertConfig {
    fn default() -> Self {
        CertConfig {
            n_quadruples: DEFAULT_CERT_QUADRUPLES,
            min_x_pairs: 32,
            x_budget: 1024,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertVerdict {
    NoViolation,
    Violated,
}

/// A quadruple (u₁, u₂, x₁, x₂) where the contraction inequality fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertWitness {
    pub x1: Point,
    pub x2: Point,
    pub u1: Point,
    pub u2: Point,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub verdict: CertVerdict,
    pub contraction: ContractionType,
    pub class: RelationClass,
    pub witnesses: Vec<CertWitness>,
    pub quadruples_checked: usize,
    pub x_pairs_checked: usize,
    /// Grid points x with a solution of the proximal constraint.
    pub admissible_x: usize,
    pub x_grid_size: usize,
    /// Largest lhs / r over checked quadruples with r > 0, where r is the
    /// first argument passed to f.
    pub max_lhs_over_r: Option<f64>,
    pub seed: u64,
}

const CERT_SALT: u64 = 0x9E37_79B9_7F4A_7C15;
const MAX_CERT_WITNESSES: usize = 10;

#[derive(Debug, Clone)]
struct CertAcc {
    quadruples: usize,
    witnesses: Vec<CertWitness>,
    max_ratio: Option<f64>,
}

impl CertAcc {
    fn empty() -> Self {
        CertAcc {
            quadruples: 0,
            witnesses: Vec::new(),
            max_ratio: None,
        }
    }

    fn merge(mut self, other: CertAcc) -> CertAcc {
        self.quadruples += other.quadruples;
        let room = MAX_CERT_WITNESSES.saturating_sub(self.witnesses.len());
        self.witnesses.extend(other.witnesses.into_iter().take(room));
        self.max_ratio = match (self.max_ratio, other.max_ratio) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

struct Candidate {
    x: Point,
    sx: Point,
}

fn gammas(contraction: ContractionType) -> Vec<f64> {
    match contraction {
        ContractionType::Strong => (0..GAMMA_STEPS).map(|k| 1.0 + k as f64 / GAMMA_STEPS as f64).collect(),
        _ => vec![1.0],
    }
}

/// Search for quadruples (u₁, u₂, x₁, x₂) violating the instance's
/// contraction definition.
///
/// x candidates come from a grid of G plus the sampled G₀. For each x the
/// proximal constraint d(u, Sx) = dist(G,H) (or ≤ γ·dist(G,H) for the strong
/// definition, over 32 values of γ in [1, 2)) is solved exactly up to
/// [`SOLUTION_CAP`] points, and every u₁ × u₂ combination is tested. Pairs
/// (x₁, x₂) are drawn from a seeded stream, so a larger `n_quadruples` only
/// extends the checked prefix. A `NoViolation` verdict is not a proof.
pub fn certify_contraction(inst: &ProximalInstance, pair: &ProximalPair, cfg: &CertConfig) -> Result<CertReport> {
    let metric = inst.metric;
    let tol = inst.tolerances.feas;
    let dist = pair.dist;
    let gamma = gammas(inst.contraction);
    let gamma_max = *gamma.last().expect("at least one gamma");

    let (_, mut xs) = budget_grid(&inst.g, GRID_START / 64.0, cfg.x_budget)?;
    xs.extend(pair.g0.iter().cloned());
    xs.sort_by(|a, b| a.lex_cmp(b));
    xs.dedup();
    let x_grid_size = xs.len();

    let images = par::map(&xs, |x| -> Result<Option<Candidate>> {
        let sx = inst.apply(x)?;
        let (_, to_h) = inst.h.project_unchecked(sx.coords(), &metric);
        if to_h > tol {
            return Err(Error::OutsideRegion {
                region: "H",
                point: sx,
                distance: to_h,
            });
        }
        let (_, to_g) = inst.g.project_unchecked(sx.coords(), &metric);
        Ok((to_g <= gamma_max * dist + tol).then(|| Candidate { x: x.clone(), sx }))
    });
    let mut cands = Vec::new();
    for c in images {
        cands.extend(c?);
    }
    if cands.is_empty() {
        return Err(Error::EmptyProximalSet);
    }

    let section = |c: &Candidate, g: f64| inst.g.ball_section(&c.sx, g * dist + tol, &metric, SOLUTION_CAP);
    let with_images = |us: Vec<Point>| -> Result<(Vec<Point>, Vec<Point>)> {
        let images = if inst.contraction == ContractionType::Second {
            us.iter().map(|u| inst.apply(u)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok((us, images))
    };
    // with a single γ the solution sets are small enough to keep
    let cached: Option<Vec<(Vec<Point>, Vec<Point>)>> = if gamma.len() == 1 {
        Some(
            par::map(&cands, |c| with_images(section(c, 1.0)))
                .into_iter()
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    // per-candidate solution counts for every γ, used to plan the pair stream
    let sizes: Vec<Vec<usize>> = match &cached {
        Some(sets) => sets.iter().map(|(us, _)| vec![us.len()]).collect(),
        None => par::map(&cands, |c| gamma.iter().map(|&g| section(c, g).len()).collect()),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(inst.seed ^ CERT_SALT);
    let mut pairs = Vec::new();
    let mut planned = 0usize;
    let min_pairs = cfg.min_x_pairs.min(cands.len() * cands.len());
    while planned < cfg.n_quadruples.max(1) || pairs.len() < min_pairs {
        let i = rng.gen_range(0..cands.len());
        let j = rng.gen_range(0..cands.len());
        planned += sizes[i].iter().zip(&sizes[j]).map(|(a, b)| a * b).sum::<usize>().max(1);
        pairs.push((i, j));
    }

    let f = &inst.relation;
    let class = inst.class();
    let contraction = inst.contraction;
    let cert_tol = inst.tolerances.cert;
    let d = |a: &Point, b: &Point| metric.dist(a.coords(), b.coords());

    let check_pair = |&(i, j): &(usize, usize)| -> std::result::Result<CertAcc, Error> {
        let (c1, c2) = (&cands[i], &cands[j]);
        let mut acc = CertAcc::empty();
        for &g in &gamma {
            let (owned1, owned2);
            let ((us1, su1), (us2, su2)) = match &cached {
                Some(sets) => (&sets[i], &sets[j]),
                None => {
                    owned1 = with_images(section(c1, g))?;
                    owned2 = with_images(section(c2, g))?;
                    (&owned1, &owned2)
                }
            };
            for (a, u1) in us1.iter().enumerate() {
                for (b, u2) in us2.iter().enumerate() {
                    let (lhs, r, s, t) = match (contraction, class) {
                        (ContractionType::Second, RelationClass::A) => (
                            d(&su1[a], &su2[b]),
                            d(&c1.sx, &c2.sx),
                            d(&su1[a], &c1.sx),
                            d(&su2[b], &c2.sx),
                        ),
                        (ContractionType::Second, RelationClass::Aprime) => (
                            d(&su1[a], &su2[b]),
                            d(&c1.sx, &c2.sx),
                            d(&su1[a], &c2.sx),
                            d(&su2[b], &c1.sx),
                        ),
                        (_, RelationClass::A) => (d(u1, u2), d(&c1.x, &c2.x), d(u1, &c1.x), d(u2, &c2.x)),
                        (_, RelationClass::Aprime) => (d(u1, u2), d(&c1.x, &c2.x), d(u1, &c2.x), d(u2, &c1.x)),
                    };
                    let slack = if contraction == ContractionType::Strong {
                        (g - 1.0) * dist
                    } else {
                        0.0
                    };
                    let rhs = f.eval(r, s, t).map_err(Error::from)? + slack;
                    acc.quadruples += 1;
                    if r > cert_tol {
                        let ratio = lhs / r;
                        acc.max_ratio = Some(acc.max_ratio.map_or(ratio, |m: f64| m.max(ratio)));
                    }
                    if lhs - rhs > cert_tol && acc.witnesses.len() < MAX_CERT_WITNESSES {
                        acc.witnesses.push(CertWitness {
                            x1: c1.x.clone(),
                            x2: c2.x.clone(),
                            u1: u1.clone(),
                            u2: u2.clone(),
                            gamma: (contraction == ContractionType::Strong).then_some(g),
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
        Ok(acc)
    };

    let acc = par::map_reduce(
        &pairs,
        || Ok(CertAcc::empty()),
        check_pair,
        |a, b| match (a, b) {
            (Err(e), _) | (Ok(_), Err(e)) => Err(e),
            (Ok(a), Ok(b)) => Ok(a.merge(b)),
        },
    )?;

    Ok(CertReport {
        verdict: if acc.witnesses.is_empty() {
            CertVerdict::NoViolation
        } else {
            CertVerdict::Violated
        },
        contraction,
        class,
        witnesses: acc.witnesses,
        quadruples_checked: acc.quadruples,
        x_pairs_checked: pairs.len(),
        admissible_x: cands.len(),
        x_grid_size,
        max_lhs_over_r: acc.max_ratio,
        seed: inst.seed,
    })
}

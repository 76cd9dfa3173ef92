//! Sampling falsifiers for the implicit-relation classes 𝒜 and 𝒜′, and the
//! catalog of classical contraction relations.
//!
//! 𝒜:  (A1) r ≤ f(s,s,r) or r ≤ f(r,s,s) ⇒ r ≤ k·s with k < 1;
//!     (A2) f(r,0,0) ≤ α·r with α < 1.
//! 𝒜′: (A'1) r ≤ f(s,0,r+s) ⇒ r ≤ k·s with k < 1;
//!     (A'2) f is nondecreasing in its third argument;
//!     (A'3) r ≤ f(r,r,r) ⇒ r = 0.
//!
//! Both quantify over all of ℝ₊, so a `Pass` only means no sampled tuple in
//! [0, R]⁴ contradicts the axioms.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dsl::{parse_relation, EvalError, RelationClass, RelationExpr};
use crate::error::{Error, Result};
use crate::par;

pub const DEFAULT_SEED: u64 = 0xBA5E;
const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassCheckConfig {
    pub domain_bound: f64,
    pub n_samples: usize,
    pub tol: f64,
    pub margin: f64,
    pub seed: u64,
}

impl Default for ClassCheckConfig {
    fn default() -> Self {
        ClassCheckConfig {
            domain_bound: 10.0,
            n_samples: 100_000,
            tol: 1e-9,
            margin: 1e-6,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// No violation, but the constant estimate is too close to 1 to separate.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Property {
    A1,
    A2,
    #[serde(rename = "A'1")]
    Aprime1,
    #[serde(rename = "A'2")]
    Aprime2,
    #[serde(rename = "A'3")]
    Aprime3,
}

/// A sampled tuple contradicting one of the axioms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassWitness {
    pub property: Property,
    pub r: f64,
    pub s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    /// The offending quantity: a ratio for A1/A2/A'1, f(r,s,t) − f(r,s,t1)
    /// for A'2, r itself for A'3.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub class: RelationClass,
    pub verdict: Verdict,
    /// Supremum of r/s over tuples meeting the (A1)/(A'1) hypothesis, capped at 1.
    pub k_hat: Option<f64>,
    /// Supremum of f(r,0,0)/r, clamped to [0, 1]; 𝒜 only.
    pub alpha_hat: Option<f64>,
    pub witnesses: Vec<ClassWitness>,
    pub samples_checked: usize,
    pub domain_bound: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    r: f64,
    s: f64,
    t: f64,
    t1: f64,
}

/// Largest dyadic level L with (2^L + 1)² ≤ n/2. Grids at successive levels
/// are nested, so raising n never drops a grid point.
fn grid_level(n: usize) -> Option<u32> {
    let half = n / 2;
    let mut level = None;
    let mut l = 0u32;
    while l < 30 {
        let side = (1usize << l) + 1;
        if side * side > half {
            break;
        }
        level = Some(l);
        l += 1;
    }
    level
}

fn samples(cfg: &ClassCheckConfig) -> Vec<Sample> {
    let r_dom = cfg.domain_bound;
    let mut out = Vec::with_capacity(cfg.n_samples);
    if let Some(level) = grid_level(cfg.n_samples) {
        let m = 1usize << level;
        let h = r_dom / m as f64;
        for i in 0..=m {
            for j in 0..=m {
                let (r, s) = (i as f64 * h, j as f64 * h);
                out.push(Sample {
                    r,
                    s,
                    t: r.min(s),
                    t1: r.max(s),
                });
            }
        }
    }
    // the random part is a prefix of one seeded stream
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_random = cfg.n_samples - out.len();
    for _ in 0..n_random {
        let r = rng.gen::<f64>() * r_dom;
        let s = rng.gen::<f64>() * r_dom;
        let a = rng.gen::<f64>() * r_dom;
        let b = rng.gen::<f64>() * r_dom;
        out.push(Sample {
            r,
            s,
            t: a.min(b),
            t1: a.max(b),
        });
    }
    out
}

#[derive(Debug, Clone)]
struct Acc {
    k_sup: f64,
    alpha_sup: f64,
    witnesses: Vec<ClassWitness>,
    checked: usize,
}

impl Acc {
    fn empty() -> Self {
        Acc {
            k_sup: 0.0,
            alpha_sup: 0.0,
            witnesses: Vec::new(),
            checked: 0,
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.k_sup = self.k_sup.max(other.k_sup);
        self.alpha_sup = self.alpha_sup.max(other.alpha_sup);
        let room = MAX_WITNESSES.saturating_sub(self.witnesses.len());
        self.witnesses.extend(other.witnesses.into_iter().take(room));
        self.checked += other.checked;
        self
    }

    fn witness(&mut self, property: Property, s: &Sample, value: f64, with_t: bool) {
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(ClassWitness {
                property,
                r: s.r,
                s: s.s,
                t: with_t.then_some(s.t),
                t1: with_t.then_some(s.t1),
                value,
            });
        }
    }

    /// The (A1)/(A'1) conclusion r ≤ k·s, given that the hypothesis held.
    fn ratio_test(&mut self, property: Property, smp: &Sample, cfg: &ClassCheckConfig) {
        if smp.s > cfg.tol {
            let ratio = smp.r / smp.s;
            self.k_sup = self.k_sup.max(ratio);
            if ratio > 1.0 - cfg.margin {
                self.witness(property, smp, ratio, false);
            }
        } else if smp.r > cfg.tol {
            // s = 0 forces r = 0
            self.k_sup = f64::INFINITY;
            self.witness(property, smp, f64::INFINITY, false);
        }
    }
}

type Merged = std::result::Result<Acc, EvalError>;

fn merge(a: Merged, b: Merged) -> Merged {
    match (a, b) {
        (Err(e), _) => Err(e),
        (Ok(_), Err(e)) => Err(e),
        (Ok(a), Ok(b)) => Ok(a.merge(b)),
    }
}

fn check_a(f: &RelationExpr, smp: &Sample, cfg: &ClassCheckConfig) -> Merged {
    let mut acc = Acc::empty();
    acc.checked = 1;
    let (r, s) = (smp.r, smp.s);
    let hyp = r <= f.eval(s, s, r)? + cfg.tol || r <= f.eval(r, s, s)? + cfg.tol;
    if hyp {
        acc.ratio_test(Property::A1, smp, cfg);
    }
    if r > cfg.tol {
        let ratio = f.eval(r, 0.0, 0.0)? / r;
        acc.alpha_sup = acc.alpha_sup.max(ratio);
        if ratio > 1.0 - cfg.margin {
            acc.witness(Property::A2, smp, ratio, false);
        }
    }
    Ok(acc)
}

fn check_aprime(f: &RelationExpr, smp: &Sample, cfg: &ClassCheckConfig) -> Merged {
    let mut acc = Acc::empty();
    acc.checked = 1;
    let (r, s) = (smp.r, smp.s);
    if r <= f.eval(s, 0.0, r + s)? + cfg.tol {
        acc.ratio_test(Property::Aprime1, smp, cfg);
    }
    let gap = f.eval(r, s, smp.t)? - f.eval(r, s, smp.t1)?;
    if gap > cfg.tol {
        acc.witness(Property::Aprime2, smp, gap, true);
    }
    if r > cfg.tol && r <= f.eval(r, r, r)? + cfg.tol {
        acc.witness(Property::Aprime3, smp, r, false);
    }
    Ok(acc)
}

fn run(f: &RelationExpr, class: RelationClass, cfg: &ClassCheckConfig) -> Result<ClassReport> {
    if cfg.n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    if cfg.domain_bound.is_nan() || cfg.domain_bound <= 0.0 {
        return Err(Error::InvalidArgument("domain bound must be positive".into()));
    }
    let pts = samples(cfg);
    let acc = par::map_reduce(
        &pts,
        || Ok(Acc::empty()),
        |smp| match class {
            RelationClass::A => check_a(f, smp, cfg),
            RelationClass::Aprime => check_aprime(f, smp, cfg),
        },
        merge,
    )?;
    let k_hat = acc.k_sup.min(1.0);
    let alpha_hat = (class == RelationClass::A).then(|| acc.alpha_sup.clamp(0.0, 1.0));
    let bounded = k_hat <= 1.0 - cfg.margin && alpha_hat.is_none_or(|a| a <= 1.0 - cfg.margin);
    let verdict = if !acc.witnesses.is_empty() || !bounded {
        Verdict::Fail
    } else if k_hat > 1.0 - 10.0 * cfg.margin || alpha_hat.is_some_and(|a| a > 1.0 - 10.0 * cfg.margin) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(ClassReport {
        class,
        verdict,
        k_hat: Some(k_hat),
        alpha_hat,
        witnesses: acc.witnesses,
        samples_checked: acc.checked,
        domain_bound: cfg.domain_bound,
        seed: cfg.seed,
    })
}

/// Falsify membership of `f` in 𝒜 on [0, R]² (half dyadic grid, half seeded
/// uniform samples), estimating k and α.
pub fn check_class_a(f: &RelationExpr, cfg: &ClassCheckConfig) -> Result<ClassReport> {
    run(f, RelationClass::A, cfg)
}

/// Falsify membership of `f` in 𝒜′, estimating k.
pub fn check_class_aprime(f: &RelationExpr, cfg: &ClassCheckConfig) -> Result<ClassReport> {
    run(f, RelationClass::Aprime, cfg)
}

/// Check against the relation's declared class.
pub fn check_declared_class(f: &RelationExpr, cfg: &ClassCheckConfig) -> Result<ClassReport> {
    run(f, f.declared_class, cfg)
}

pub const CATALOG: [&str; 5] = ["basha", "kannan", "reich", "bianchini", "khan"];

fn param(name: &str, params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    params.get(key).copied().ok_or_else(|| Error::MissingParam {
        relation: name.into(),
        param: key.into(),
    })
}

fn in_range(key: &str, value: f64, upper: f64, range: &str) -> Result<()> {
    if (0.0..upper).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange {
            name: key.into(),
            value,
            range: range.into(),
        })
    }
}

/// Named relation with its constants substituted:
///
/// | name      | f(r,s,t)            | constraint                  |
/// |-----------|---------------------|-----------------------------|
/// | basha     | α·r                 | 0 ≤ α < 1                   |
/// | kannan    | α·(s+t)             | 0 ≤ α < 1/2                 |
/// | reich     | α₁r + α₂s + α₃t     | 0 ≤ αᵢ < 1, α₁+α₂+α₃ < 1    |
/// | bianchini | α·max(s,t)          | 0 ≤ α < 1                   |
/// | khan      | α·sqrt(s·t)         | 0 ≤ α < 1                   |
///
/// Reich takes `alpha1`, `alpha2`, `alpha3`; the others take `alpha`.
pub fn catalog_relation(name: &str, params: &BTreeMap<String, f64>) -> Result<RelationExpr> {
    let text = match name {
        "basha" | "bianchini" | "khan" => {
            let a = param(name, params, "alpha")?;
            in_range("alpha", a, 1.0, "[0, 1)")?;
            match name {
                "basha" => format!("{a}*r"),
                "bianchini" => format!("{a}*max(s,t)"),
                _ => format!("{a}*sqrt(s*t)"),
            }
        }
        "kannan" => {
            let a = param(name, params, "alpha")?;
            in_range("alpha", a, 0.5, "[0, 1/2)")?;
            format!("{a}*(s+t)")
        }
        "reich" => {
            let a1 = param(name, params, "alpha1")?;
            let a2 = param(name, params, "alpha2")?;
            let a3 = param(name, params, "alpha3")?;
            in_range("alpha1", a1, 1.0, "[0, 1)")?;
            in_range("alpha2", a2, 1.0, "[0, 1)")?;
            in_range("alpha3", a3, 1.0, "[0, 1)")?;
            in_range("alpha1+alpha2+alpha3", a1 + a2 + a3, 1.0, "[0, 1)")?;
            format!("{a1}*r+{a2}*s+{a3}*t")
        }
        _ => return Err(Error::UnknownName(name.into())),
    };
    let mut f = parse_relation(&text)?;
    f.params = params.clone();
    Ok(f)
}

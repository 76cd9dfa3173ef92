//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use proxipoint_cli::{fixture, fixtures, parse_config, run_example, Expected};
use proxipoint_core::relations::{catalog_relation, ClassCheckConfig, CATALOG};
use proxipoint_core::solvers::DEFAULT_MAX_ITER;
use proxipoint_core::{
    certify_contraction, check_class_a, check_class_aprime, check_declared_class, compute_proximal_pair, estimate_rate,
    parse_relation, proximal_step, solve_first_kind, solve_strong, CertConfig, CertVerdict, Error, Point, Verdict,
};

const POINT_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-6;
const EXAMPLE_TIME: Duration = Duration::from_secs(1);
const CERT_TIME: Duration = Duration::from_secs(30);
const RATE_TOL: f64 = 1e-9;
const CLASS_TOL: f64 = 1e-6;
const ORACLE_RES_1D: f64 = 1e-4;
const ORACLE_RES_2D: f64 = 1e-3;

type Check = Result<(), String>;
type Criterion = fn() -> Check;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn example_reproduction() -> Check {
    for fx in fixtures() {
        let start = Instant::now();
        let out = run_example(fx.name, None).map_err(|e| format!("{}: {e}", fx.name))?;
        let elapsed = start.elapsed();
        ensure(elapsed < EXAMPLE_TIME, || format!("{}: took {elapsed:?}", fx.name))?;
        let solve = out.report.solve.as_ref().ok_or("no solve section")?;
        ensure(solve.residual <= RESIDUAL_TOL, || {
            format!("{}: residual {}", fx.name, solve.residual)
        })?;
        let expected = fx.expected.points();
        ensure(
            expected
                .iter()
                .any(|e| max_abs(e.coords(), solve.point.coords()) <= POINT_TOL),
            || format!("{}: point {} not in {expected:?}", fx.name, solve.point),
        )?;
        if let Expected::Multiple(_) = fx.expected {
            match &solve.unique {
                proxipoint_core::Uniqueness::Multiple(found) => ensure(
                    found.len() == expected.len()
                        && expected
                            .iter()
                            .all(|e| found.iter().any(|f| max_abs(e.coords(), f.coords()) <= POINT_TOL)),
                    || format!("{}: multiplicity {found:?}", fx.name),
                )?,
                other => return Err(format!("{}: expected several points, got {other:?}", fx.name)),
            }
        }
        ensure(out.exit_code == 0, || {
            format!("{}: exit code {}", fx.name, out.exit_code)
        })?;
    }
    Ok(())
}

fn geometric_rate() -> Check {
    let cfg = parse_config(fixture("l1-second-type").unwrap().config).map_err(|e| e.to_string())?;
    let pair = compute_proximal_pair(&cfg.instance).map_err(|e| e.to_string())?;
    let r = solve_first_kind(&cfg.instance, &pair, &Point::from([4.0, 1.0]), DEFAULT_MAX_ITER)
        .map_err(|e| e.to_string())?;
    let rate = estimate_rate(&r.trace).map_err(|e| e.to_string())?;
    ensure((rate.k_hat - 0.5).abs() <= RATE_TOL, || {
        format!("k_hat = {}", rate.k_hat)
    })?;
    let l1 = |a: &Point, b: &Point| {
        a.coords()
            .iter()
            .zip(b.coords())
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
    };
    let star = Point::from([4.0, 0.0]);
    let first = l1(&r.trace.iterates[0], &r.trace.iterates[1]);
    for (n, u) in r.trace.iterates.iter().enumerate() {
        let bound = rate.k_hat.powi(n as i32) / (1.0 - rate.k_hat) * first;
        ensure(l1(u, &star) <= bound + 1e-12, || format!("bound fails at n = {n}"))?;
    }
    Ok(())
}

fn class_certification() -> Check {
    let cfg = ClassCheckConfig::default();
    for name in CATALOG {
        let params: BTreeMap<String, f64> = match name {
            "reich" => [("alpha1", 0.3), ("alpha2", 0.3), ("alpha3", 0.3)].as_slice(),
            "kannan" => [("alpha", 0.45)].as_slice(),
            _ => [("alpha", 0.9)].as_slice(),
        }
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect();
        let f = catalog_relation(name, &params).map_err(|e| e.to_string())?;
        let rep = check_class_a(&f, &cfg).map_err(|e| e.to_string())?;
        ensure(rep.verdict == Verdict::Pass, || format!("{name}: {:?}", rep.verdict))?;
        let k = rep.k_hat.unwrap_or(f64::INFINITY);
        let a = rep.alpha_hat.unwrap_or(f64::INFINITY);
        ensure(k < 1.0 - CLASS_TOL && a < 1.0 - CLASS_TOL, || {
            format!("{name}: k = {k}, alpha = {a}")
        })?;
    }
    for (text, k_expected) in [("(1/3)*(s+t)", 0.5), ("(1/4)*(s+t)", 1.0 / 3.0)] {
        let rep = check_class_aprime(&parse_relation(text).unwrap(), &cfg).map_err(|e| e.to_string())?;
        let k = rep.k_hat.unwrap_or(f64::INFINITY);
        ensure(
            rep.verdict == Verdict::Pass && (k - k_expected).abs() <= CLASS_TOL,
            || format!("{text}: {:?}, k = {k}", rep.verdict),
        )?;
    }
    let rep = check_class_a(&parse_relation("r").unwrap(), &cfg).map_err(|e| e.to_string())?;
    ensure(rep.verdict == Verdict::Fail && !rep.witnesses.is_empty(), || {
        format!("f = r: {:?} with {} witnesses", rep.verdict, rep.witnesses.len())
    })
}

fn contraction_certification() -> Check {
    for name in [
        "basha-ex1",
        "kannan-ex",
        "piecewise-Aprime",
        "l1-second-type",
        "strong-ex",
    ] {
        let cfg = parse_config(fixture(name).unwrap().config).map_err(|e| e.to_string())?;
        ensure(cfg.instance.seed == 0xBA5E, || {
            format!("{name}: seed {}", cfg.instance.seed)
        })?;
        let start = Instant::now();
        let pair = compute_proximal_pair(&cfg.instance).map_err(|e| e.to_string())?;
        let rep = certify_contraction(&cfg.instance, &pair, &CertConfig::default()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        ensure(rep.verdict == CertVerdict::NoViolation, || {
            format!("{name}: {:?}", rep.witnesses)
        })?;
        ensure(rep.quadruples_checked >= 10_000, || {
            format!("{name}: {} quadruples", rep.quadruples_checked)
        })?;
        ensure(elapsed <= CERT_TIME, || format!("{name}: took {elapsed:?}"))?;
    }
    Ok(())
}

fn strong_structure() -> Check {
    let cfg = parse_config(fixture("strong-ex").unwrap().config).map_err(|e| e.to_string())?;
    let inst = &cfg.instance;
    let pair = compute_proximal_pair(inst).map_err(|e| e.to_string())?;
    let class = check_declared_class(&inst.relation, &ClassCheckConfig::default()).map_err(|e| e.to_string())?;
    let (_, family) = solve_strong(inst, &pair, 64, &class).map_err(|e| e.to_string())?;
    ensure(family.levels.len() == 64, || format!("{} levels", family.levels.len()))?;
    let res = family.resolution;
    for (i, level) in family.levels.iter().enumerate() {
        let p = level.p as f64;
        // F_p = {x in [0, 1] : 6 - 2x <= 4 (1 + 1/p)} = [max(0, 1 - 2/p), 1]
        let lo = (1.0 - 2.0 / p).max(0.0);
        let members: Vec<f64> = family.members(i).map(|x| x[0]).collect();
        ensure(members.iter().all(|&x| x >= lo - 1e-12 && x <= 1.0), || {
            format!("F_{p} has a stray member")
        })?;
        if i > 0 {
            let prev = &family.levels[i - 1].members;
            ensure(level.members.iter().all(|m| prev.contains(m)), || {
                format!("F_{p} not inside F_{}", p - 1.0)
            })?;
        }
        let exact = (2.0 / p).min(1.0);
        ensure((level.diameter - exact).abs() <= res, || {
            format!("diam F_{p} = {} vs {exact}", level.diameter)
        })?;
        ensure(level.diameter <= 16.0 / (3.0 * p) + res, || {
            format!("diam F_{p} above the bound")
        })?;
    }
    Ok(())
}

/// Hand-written copy of a fixture for the brute-force oracle.
struct Oracle {
    name: &'static str,
    samples: Vec<Vec<f64>>,
    map: fn(&[f64]) -> Vec<f64>,
    metric: fn(&[f64], &[f64]) -> f64,
    dist: f64,
    res: f64,
}

fn abs1(a: &[f64], b: &[f64]) -> f64 {
    (a[0] - b[0]).abs()
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn line(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round() as usize;
    if n == 0 {
        return vec![lo];
    }
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn oracles() -> Vec<Oracle> {
    let r1 = ORACLE_RES_1D;
    let r2 = ORACLE_RES_2D;
    let one = |lo: f64, hi: f64| line(lo, hi, r1).into_iter().map(|x| vec![x]).collect::<Vec<_>>();
    let grid2 = |a: (f64, f64), b: (f64, f64)| {
        let ys = line(b.0, b.1, r2);
        line(a.0, a.1, r2)
            .into_iter()
            .flat_map(|x| ys.iter().map(move |&y| vec![x, y]))
            .collect::<Vec<_>>()
    };
    let mut seg = grid2((2.0, 2.0), (0.0, 3.0));
    seg.extend(grid2((0.0, 2.0), (2.0, 2.0)));
    let mut two = one(-1.0, -0.5);
    two.extend(one(0.5, 1.0));
    vec![
        Oracle {
            name: "basha-ex1",
            samples: one(2.0, 12.0),
            map: |x| vec![(2.0 - 3.0 * x[0]) / 4.0],
            metric: abs1,
            dist: 3.0,
            res: r1,
        },
        Oracle {
            name: "kannan-ex",
            samples: one(6.0, 7.0),
            map: |x| vec![9.0 - x[0]],
            metric: abs1,
            dist: 3.0,
            res: r1,
        },
        Oracle {
            name: "piecewise-Aprime",
            samples: one(3.0, 5.0),
            map: |x| vec![if x[0] <= 4.0 { 1.0 } else { 5.0 - x[0] }],
            metric: abs1,
            dist: 2.0,
            res: r1,
        },
        Oracle {
            name: "l1-second-type",
            samples: grid2((4.0, 5.0), (0.0, 1.0)),
            map: |p| vec![1.0, p[1] / 2.0],
            metric: l1,
            dist: 3.0,
            res: r2,
        },
        Oracle {
            name: "segment-union",
            samples: seg,
            map: |p| vec![p[0] / 2.0, 0.0],
            metric: l1,
            dist: 1.0,
            res: r2,
        },
        Oracle {
            name: "two-interval",
            samples: two,
            map: |_| vec![0.0],
            metric: abs1,
            dist: 0.5,
            res: r1,
        },
        Oracle {
            name: "strong-ex",
            samples: one(0.0, 1.0),
            map: |x| vec![6.0 - x[0]],
            metric: abs1,
            dist: 4.0,
            res: r1,
        },
    ]
}

fn brute_force_equivalence() -> Check {
    let all = oracles();
    ensure(all.len() == fixtures().len(), || "an example has no oracle".into())?;
    for o in all {
        let residual = |x: &Vec<f64>| ((o.metric)(x, &(o.map)(x)) - o.dist).abs();
        let best = o.samples.iter().map(residual).fold(f64::INFINITY, f64::min);
        let argmin: Vec<&Vec<f64>> = o.samples.iter().filter(|x| residual(x) <= best + 1e-12).collect();
        let out = run_example(o.name, None).map_err(|e| format!("{}: {e}", o.name))?;
        let point = out.report.solve.unwrap().point;
        ensure(argmin.iter().any(|a| max_abs(a, point.coords()) <= o.res), || {
            format!(
                "{}: solver {} far from grid argmin {:?}",
                o.name,
                point,
                &argmin[..argmin.len().min(4)]
            )
        })?;
    }
    Ok(())
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_proxipoint"))
}

fn hypothesis_failure() -> Check {
    let cfg = parse_config(fixture("kannan-ex").unwrap().config).map_err(|e| e.to_string())?;
    let pair = compute_proximal_pair(&cfg.instance).map_err(|e| e.to_string())?;
    match proximal_step(&cfg.instance, &pair, &Point::scalar(2.0), None) {
        Err(Error::NoFeasiblePoint { .. }) => {}
        other => return Err(format!("kannan-ex, y = 2: {other:?}")),
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("shifted.json");
    std::fs::write(
        &path,
        r#"{
  "metric": { "kind": "L2", "dim": 1 },
  "G": { "shape": "interval", "lo": 0, "hi": 1 },
  "H": { "shape": "interval", "lo": 3, "hi": 4 },
  "map": "3 + x",
  "relation": { "text": "0.5*r", "class": "A" },
  "contraction_type": "first",
  "solver": { "scheme": "first", "x0": [1] }
}"#,
    )
    .map_err(|e| e.to_string())?;
    let out = bin()
        .args(["solve", "-c"])
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(2), || {
        format!("exit code {:?}", out.status.code())
    })
}

fn determinism() -> Check {
    let cfg = |name: &str| format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let runs: Vec<Vec<String>> = vec![
        vec!["solve".into(), "-c".into(), cfg("l1-second-type")],
        vec![
            "solve".into(),
            "-c".into(),
            cfg("strong-ex"),
            "--seed".into(),
            "11".into(),
        ],
        vec!["certify".into(), "-c".into(), cfg("piecewise-Aprime")],
        vec!["distance".into(), "-c".into(), cfg("segment-union")],
        vec![
            "classify-relation".into(),
            "-e".into(),
            "0.5*r + 0.2*(s+t)".into(),
            "--class".into(),
            "A".into(),
        ],
        vec!["run-example".into(), "two-interval".into()],
        vec!["list-examples".into()],
    ];
    for args in runs {
        let a = bin().args(&args).output().map_err(|e| e.to_string())?;
        let b = bin().args(&args).output().map_err(|e| e.to_string())?;
        ensure(a.status.success() && !a.stdout.is_empty(), || {
            format!("{args:?}: {:?}", a.status)
        })?;
        ensure(a.stdout == b.stdout, || format!("{args:?}: reports differ"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("1 example reproduction", example_reproduction),
        ("2 geometric rate", geometric_rate),
        ("3 class certification", class_certification),
        ("4 contraction certification", contraction_certification),
        ("5 strong-theorem structure", strong_structure),
        ("6 brute-force oracle equivalence", brute_force_equivalence),
        ("7 hypothesis-failure behavior", hypothesis_failure),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS criterion {name}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

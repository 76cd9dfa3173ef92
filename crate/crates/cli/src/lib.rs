//! Command-line harness for proxipoint: JSON instance configs, the example
//! registry, subcommand implementations and deterministic reports.

pub mod config;
pub mod error;
pub mod registry;
pub mod report;
pub mod trace;

use proxipoint_core::relations::ClassCheckConfig;
use proxipoint_core::{
    certify_contraction, check_declared_class, compute_proximal_pair, parse_relation, solve_first_kind,
    solve_second_kind, solve_strong, CertConfig, CertVerdict, IterationTrace, Point, RelationClass, Uniqueness,
    Verdict,
};

pub use config::{load_instance, parse_config, InstanceConfig, LoadedConfig, Scheme, TraceFormat};
pub use error::{CliError, Result};
pub use registry::{fixture, fixtures, Expected, Fixture};
pub use report::RunReport;
pub use trace::emit_trace;

use error::{EXIT_FAILURE, EXIT_VIOLATION};
use report::{DistanceSummary, ExampleCheck, InstanceSummary, SolveSummary};

/// A finished command: its report and the process exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
    pub trace: Option<IterationTrace>,
}

impl Outcome {
    fn ok(report: RunReport) -> Self {
        Outcome {
            report,
            exit_code: 0,
            trace: None,
        }
    }
}

/// Tolerance for comparing a solved point with a fixture's expected point.
pub const EXAMPLE_TOL: f64 = 1e-6;

fn class_config(seed: u64) -> ClassCheckConfig {
    ClassCheckConfig {
        seed,
        ..ClassCheckConfig::default()
    }
}

pub fn distance(cfg: &LoadedConfig) -> Result<Outcome> {
    let pair = compute_proximal_pair(&cfg.instance)?;
    let mut report = RunReport::new("distance");
    report.instance = Some(InstanceSummary::new(&cfg.instance));
    report.distance = Some(DistanceSummary::new(&pair));
    Ok(Outcome::ok(report))
}

pub fn certify(cfg: &LoadedConfig, quadruples: Option<usize>) -> Result<Outcome> {
    let inst = &cfg.instance;
    let pair = compute_proximal_pair(inst)?;
    let cert = certify_contraction(
        inst,
        &pair,
        &CertConfig {
            n_quadruples: quadruples.unwrap_or(cfg.quadruples),
            ..CertConfig::default()
        },
    )?;
    let exit_code = if cert.verdict == CertVerdict::Violated {
        EXIT_VIOLATION
    } else {
        0
    };
    let mut report = RunReport::new("certify");
    report.instance = Some(InstanceSummary::new(inst));
    report.distance = Some(DistanceSummary::new(&pair));
    report.cert_report = Some(cert);
    Ok(Outcome {
        report,
        exit_code,
        trace: None,
    })
}

pub fn classify_relation(expr: &str, class: RelationClass, seed: u64) -> Result<Outcome> {
    let f = parse_relation(expr)
        .map_err(|source| CliError::Syntax {
            key: "expression".into(),
            source,
        })?
        .with_class(class);
    let class_report = check_declared_class(&f, &class_config(seed))?;
    let exit_code = if class_report.verdict == Verdict::Fail {
        EXIT_VIOLATION
    } else {
        0
    };
    let mut report = RunReport::new("classify-relation");
    report.relation = Some(f.to_string());
    report.class_report = Some(class_report);
    Ok(Outcome {
        report,
        exit_code,
        trace: None,
    })
}

pub fn solve(cfg: &LoadedConfig, scheme: Scheme) -> Result<Outcome> {
    let inst = &cfg.instance;
    let pair = compute_proximal_pair(inst)?;
    let mut report = RunReport::new("solve");
    report.instance = Some(InstanceSummary::new(inst));
    report.distance = Some(DistanceSummary::new(&pair));
    let (summary, trace) = match scheme {
        Scheme::First | Scheme::Second => {
            let x0 = cfg.x0.clone().unwrap_or_else(|| pair.certificate.witness_g.clone());
            let r = if scheme == Scheme::First {
                solve_first_kind(inst, &pair, &x0, cfg.max_iter)?
            } else {
                solve_second_kind(inst, &pair, &x0, cfg.max_iter)?
            };
            (SolveSummary::new(scheme, Some(x0), &r, None), r.trace)
        }
        Scheme::Strong => {
            let class_report = check_declared_class(&inst.relation, &class_config(inst.seed))?;
            let (r, family) = solve_strong(inst, &pair, cfg.p_max, &class_report)?;
            report.class_report = Some(class_report);
            (SolveSummary::new(scheme, None, &r, Some(&family)), r.trace)
        }
    };
    report.solve = Some(summary);
    Ok(Outcome {
        report,
        exit_code: 0,
        trace: Some(trace),
    })
}

fn chebyshev(a: &Point, b: &Point) -> f64 {
    if a.dim() != b.dim() {
        return f64::INFINITY;
    }
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn check_example(fx: &Fixture, report: &RunReport) -> ExampleCheck {
    let expected = fx.expected.points();
    let mut reasons = Vec::new();
    if let Some(c) = &report.class_report {
        if c.verdict == Verdict::Fail {
            reasons.push("relation failed its class check".to_string());
        }
    }
    if let Some(c) = &report.cert_report {
        if c.verdict == CertVerdict::Violated {
            reasons.push("certifier found a violation".to_string());
        }
    }
    let solve = report.solve.as_ref().expect("run-example always solves");
    if solve.residual > EXAMPLE_TOL {
        reasons.push(format!("residual {} above {EXAMPLE_TOL}", solve.residual));
    }
    if !expected.iter().any(|e| chebyshev(e, &solve.point) <= EXAMPLE_TOL) {
        reasons.push(format!("point {} is not an expected point", solve.point));
    }
    match (&fx.expected, &solve.unique) {
        (Expected::Point(_), Uniqueness::Unique) => {}
        (Expected::Multiple(_), Uniqueness::Multiple(found)) => {
            let matched = found.len() == expected.len()
                && expected
                    .iter()
                    .all(|e| found.iter().any(|f| chebyshev(e, f) <= EXAMPLE_TOL));
            if !matched {
                reasons.push(format!("uniqueness scan found {found:?}"));
            }
        }
        (_, other) => reasons.push(format!("uniqueness scan returned {other:?}")),
    }
    ExampleCheck {
        expected,
        pass: reasons.is_empty(),
        reasons,
    }
}

/// classify → certify → solve (with uniqueness scan) on a registered
/// example, checked against its expected points.
pub fn run_example(name: &str, seed: Option<u64>) -> Result<Outcome> {
    let fx = fixture(name).ok_or_else(|| CliError::UnknownExample(name.into()))?;
    let mut cfg = parse_config(fx.config)?;
    if let Some(seed) = seed {
        cfg.instance.seed = seed;
    }
    let inst = &cfg.instance;
    let class_report = check_declared_class(&inst.relation, &class_config(inst.seed))?;
    let cert = certify(&cfg, None)?.report.cert_report;
    let mut solved = solve(&cfg, cfg.scheme)?;

    let mut report = RunReport::new("run-example");
    report.example = Some(fx.name.into());
    report.description = Some(fx.description.into());
    report.instance = solved.report.instance.take();
    report.distance = solved.report.distance.take();
    report.class_report = Some(class_report);
    report.cert_report = cert;
    report.solve = solved.report.solve.take();
    report.notes = fx.notes.iter().map(|s| s.to_string()).collect();
    let check = check_example(&fx, &report);
    let exit_code = if check.pass { 0 } else { EXIT_FAILURE };
    report.check = Some(check);
    Ok(Outcome {
        report,
        exit_code,
        trace: solved.trace,
    })
}

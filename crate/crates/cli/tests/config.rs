use proxipoint_cli::{fixtures, parse_config, CliError, InstanceConfig, TraceFormat};
use proxipoint_core::{compute_proximal_pair, MetricKind, RelationClass};

fn with_default(extra: &str) -> String {
    format!(
        r#"{{"metric":{{"kind":"L2","dim":1}},"G":{{"shape":"interval","lo":6,"hi":7}},"H":{{"shape":"interval","lo":2,"hi":3}},"map":"9 - x","relation":{{"text":"0.4*(s+t)"}},"contraction_type":"first"{extra}}}"#
    )
}

fn schema_key(text: &str) -> String {
    match parse_config(text) {
        Err(CliError::Schema { key, .. }) => key,
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn basha_config_has_distance_three() {
    let fx = fixtures().into_iter().find(|f| f.name == "basha-ex1").unwrap();
    let cfg = parse_config(fx.config).unwrap();
    assert_eq!(cfg.instance.metric.kind, MetricKind::L2);
    assert_eq!(compute_proximal_pair(&cfg.instance).unwrap().dist, 3.0);
}

#[test]
fn defaults_are_applied() {
    let cfg = parse_config(&with_default("")).unwrap();
    assert_eq!(cfg.instance.tolerances, proxipoint_core::Tolerances::default());
    assert_eq!(cfg.instance.seed, 0xBA5E);
    assert_eq!(cfg.max_iter, 10_000);
    assert_eq!(cfg.output.format, TraceFormat::Csv);
    assert_eq!(cfg.instance.relation.declared_class, RelationClass::A);
}

#[test]
fn aprime_relation_is_valid() {
    let text = with_default("").replace(r#"{"text":"0.4*(s+t)"}"#, r#"{"text":"(1/3)*(s+t)","class":"Aprime"}"#);
    let cfg = parse_config(&text).unwrap();
    assert_eq!(cfg.instance.relation.declared_class, RelationClass::Aprime);
}

#[test]
fn catalog_relation() {
    let text = with_default("").replace(
        r#"{"text":"0.4*(s+t)"}"#,
        r#"{"catalog":"kannan","params":{"alpha":0.4}}"#,
    );
    let cfg = parse_config(&text).unwrap();
    assert_eq!(cfg.instance.relation.eval(0.0, 1.0, 1.0).unwrap(), 0.8);
    let bad = text.replace("0.4", "0.7");
    assert_eq!(schema_key(&bad), "relation.catalog");
}

#[test]
fn schema_errors_name_the_key() {
    assert_eq!(schema_key(&with_default(r#","colour":"red""#)), "colour");
    assert_eq!(
        schema_key(&with_default(r#","solver":{"max_iters":3}"#)),
        "solver.max_iters"
    );
    assert_eq!(
        schema_key(&with_default(r#","solver":{"tolerances":{"feas":-1}}"#)),
        "solver.tolerances.feas"
    );
    let two_d = with_default("").replace(r#""dim":1"#, r#""dim":2"#);
    assert_eq!(schema_key(&two_d), "G");
    let one_var_in_2d = r#"{"metric":{"kind":"L1","dim":2},"G":{"shape":"box","bounds":[[0,1],[0,1]]},"H":{"shape":"box","bounds":[[3,4],[0,1]]},"map":"2 - 3*x","relation":{"text":"r"},"contraction_type":"first"}"#;
    assert_eq!(schema_key(one_var_in_2d), "map");
    assert_eq!(schema_key(&with_default("").replace("\"lo\":6", "\"lo\":\"six\"")), "G");
}

#[test]
fn dsl_errors_are_syntax_errors() {
    let text = with_default("").replace("9 - x", "9 - ");
    assert!(matches!(parse_config(&text), Err(CliError::Syntax { key, .. }) if key == "map"));
}

#[test]
fn infinite_bounds() {
    let text = with_default("").replace(r#""lo":6,"hi":7"#, r#""lo":6,"hi":"inf""#);
    let cfg = parse_config(&text).unwrap();
    assert_eq!(cfg.instance.g.to_string(), "[6, inf)");
}

#[test]
fn round_trip_reproduces_reports() {
    for fx in fixtures() {
        let cfg = parse_config(fx.config).unwrap();
        let text = InstanceConfig::from_instance(&cfg.instance).to_json();
        let again = parse_config(&text).unwrap();
        assert_eq!(again.instance.g, cfg.instance.g, "{}", fx.name);
        assert_eq!(again.instance.h, cfg.instance.h, "{}", fx.name);
        assert_eq!(again.instance.map, cfg.instance.map, "{}", fx.name);
        assert_eq!(again.instance.relation.body, cfg.instance.relation.body, "{}", fx.name);
        assert_eq!(again.instance.tolerances, cfg.instance.tolerances);
        assert_eq!(again.instance.seed, cfg.instance.seed);
        let a = proxipoint_cli::distance(&cfg).unwrap().report.to_json();
        let b = proxipoint_cli::distance(&again).unwrap().report.to_json();
        assert_eq!(a, b, "{}", fx.name);
    }
}

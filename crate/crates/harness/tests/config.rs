use std::path::Path;

use nlskdv_harness::config::*;
use nlskdv_harness::HarnessError;

fn parse(text: &str) -> Result<RunConfig, HarnessError> {
    parse_config(text, "test.toml")
}

#[test]
fn minimal_simulate_config_gets_defaults() {
    let cfg = parse(
        r#"
subcommand = "simulate"
[parameters]
alpha = 1.0
gamma = 1.0
N = 64
dt = 1e-3
T = 0.5
"#,
    )
    .unwrap();
    let Parameters::Simulate(p) = &cfg.parameters else {
        panic!("wrong parameters {:?}", cfg.parameters);
    };
    assert_eq!(p.beta, 0.0);
    assert!(p.dealias);
    assert_eq!((p.num_modes, p.dt, p.t_final), (64, 1e-3, 0.5));
    assert_eq!(cfg.seed, 0);
    assert_eq!(cfg.output_dir, Path::new("out"));
}

#[test]
fn grid_size_must_be_even() {
    let with_n = |n| parse(&format!("subcommand = \"simulate\"\n[parameters]\nN = {n}\n"));
    assert!(with_n(10).is_ok());
    match with_n(7) {
        Err(HarnessError::OutOfRange { key, .. }) => assert_eq!(key, "N"),
        other => panic!("expected out of range, got {other:?}"),
    }
}

#[test]
fn duplicate_key_is_a_parse_error_naming_it() {
    let err = parse("subcommand = \"picard\"\n[parameters]\ntol = 1e-10\ntol = 1e-9\n").unwrap_err();
    match err {
        HarnessError::Parse { message, .. } => assert!(message.contains("tol"), "{message}"),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn every_unknown_key_is_listed() {
    let err = parse("subcommand = \"norms\"\ncolour = 1\n[parameters]\nmembers = 3\nsize = 2\nshape = 1\n").unwrap_err();
    match err {
        HarnessError::UnknownKeys(keys) => {
            assert_eq!(keys, ["colour", "parameters.shape", "parameters.size"]);
        }
        other => panic!("expected unknown keys, got {other:?}"),
    }
}

#[test]
fn failure_kinds_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    assert!(matches!(load_config(&missing), Err(HarnessError::MissingFile(_))));
    assert!(matches!(parse("subcommand = "), Err(HarnessError::Parse { .. })));
    assert!(matches!(parse("subcommand = \"simulate\"\nx = 1"), Err(HarnessError::UnknownKeys(_))));
    assert!(matches!(
        parse("subcommand = \"simulate\"\n[parameters]\ndt = -1.0"),
        Err(HarnessError::OutOfRange { .. })
    ));
    assert!(matches!(
        parse("subcommand = \"simulate\"\n[parameters]\ndt = \"small\""),
        Err(HarnessError::Parse { .. })
    ));
    assert!(matches!(parse("subcommand = \"fly\""), Err(HarnessError::OutOfRange { .. })));
    assert!(matches!(parse("seed = 1"), Err(HarnessError::Parse { .. })));
}

#[test]
fn range_checks_per_subcommand() {
    let bad = [
        "subcommand = \"scaling\"\n[parameters]\nfamily = \"UV9\"",
        "subcommand = \"scaling\"\n[parameters]\nN = [16, 32, 64]",
        "subcommand = \"scaling\"\n[parameters]\nN = [16, 64, 32, 128]",
        "subcommand = \"lemmas\"\n[parameters]\nepsilon = 1.5",
        "subcommand = \"lemmas\"\n[parameters]\ndyadic_n = [64]",
        "subcommand = \"multipliers\"\n[parameters]\nkinds = [\"UV_w7\"]",
        "subcommand = \"multipliers\"\n[parameters]\none_minus = 0.5",
        "subcommand = \"picard\"\n[parameters]\nnum_time_samples = 8",
        "subcommand = \"norms\"\n[parameters]\ndilations = [0]",
        "subcommand = \"simulate\"\nseed = -3",
    ];
    for text in bad {
        assert!(matches!(parse(text), Err(HarnessError::OutOfRange { .. })), "{text}");
    }
}

#[test]
fn canonical_text_round_trips() {
    for sub in Subcommand::ALL {
        let cfg = RunConfig {
            seed: 17,
            ..RunConfig::defaults(sub)
        };
        let back = parse(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_toml(), cfg.to_toml());
    }
}

#[test]
fn provenance_table_is_ignored_on_load() {
    let text = "subcommand = \"norms\"\n[provenance]\nstatus = \"pass\"\n";
    assert_eq!(parse(text).unwrap(), RunConfig::defaults(Subcommand::Norms));
}

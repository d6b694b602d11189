use nlskdv_harness::config::{load_config, RunConfig, Subcommand};
use nlskdv_harness::manifest::{config_hash, render_manifest, Provenance, RunStatus};
use nlskdv_harness::table::{format_float, write_results, Cell, ResultTable};
use nlskdv_harness::HarnessError;
use proptest::prelude::*;

fn sample() -> ResultTable {
    let mut t = ResultTable::new(&["t", "M", "label"]);
    t.push(vec![0.0.into(), 1.5.into(), "a".into()]).unwrap();
    t.push(vec![0.25.into(), (1.0 / 3.0).into(), "b, quoted".into()]).unwrap();
    t
}

#[test]
fn empty_table_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    write_results(&ResultTable::new(&["t", "M", "Q", "E", "v_mean"]), &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "t,M,Q,E,v_mean\n");
}

#[test]
fn rewriting_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_results(&sample(), &a).unwrap();
    write_results(&sample(), &b).unwrap();
    write_results(&sample(), &a).unwrap();
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(
        String::from_utf8(bytes).unwrap(),
        "t,M,label\n\
         0.0000000000000000e0,1.5000000000000000e0,a\n\
         2.5000000000000000e-1,3.3333333333333331e-1,\"b, quoted\"\n"
    );
}

#[test]
fn unflagged_nan_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let mut t = sample();
    t.push(vec![0.5.into(), f64::NAN.into(), "c".into()]).unwrap();
    match write_results(&t, &path) {
        Err(HarnessError::NonFinite { row, column }) => assert_eq!((row, column.as_str()), (2, "M")),
        other => panic!("expected refusal, got {other:?}"),
    }
    assert!(!path.exists());

    let mut t = sample();
    t.push_flagged(vec![0.5.into(), f64::NAN.into(), "blow-up".into()]).unwrap();
    write_results(&t, &path).unwrap();
    assert!(std::fs::read_to_string(&path).unwrap().ends_with("5.0000000000000000e-1,NaN,blow-up\n"));
}

#[test]
fn manifest_round_trips_through_load_config() {
    let dir = tempfile::tempdir().unwrap();
    for sub in Subcommand::ALL {
        let cfg = RunConfig {
            seed: 5,
            output_dir: dir.path().join(sub.name()),
            ..RunConfig::defaults(sub)
        };
        let prov = Provenance::new(&cfg, RunStatus::Error, Some("went \"wrong\"".into()));
        let path = dir.path().join(format!("{sub}.toml"));
        std::fs::write(&path, render_manifest(&cfg, &prov)).unwrap();
        let back = load_config(&path).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(config_hash(&back), prov.config_hash);
    }
}

#[test]
fn hash_tracks_the_config() {
    let a = RunConfig::defaults(Subcommand::Norms);
    let b = RunConfig { seed: 1, ..a.clone() };
    assert_eq!(config_hash(&a), config_hash(&a.clone()));
    assert_ne!(config_hash(&a), config_hash(&b));
    assert_eq!(config_hash(&a).len(), 64);
}

fn cell() -> impl Strategy<Value = Cell> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()).prop_map(Cell::Float),
        any::<i64>().prop_map(Cell::Int),
        "[ -~]{0,12}".prop_map(Cell::Text),
        Just(Cell::Empty),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn floats_round_trip_exactly(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn written_tables_parse_back_with_consistent_width(
        rows in prop::collection::vec(prop::collection::vec(cell(), 3), 0..20)
    ) {
        let mut t = ResultTable::new(&["a", "b", "c"]);
        for r in &rows {
            t.push(r.clone()).unwrap();
        }
        let bytes = t.to_csv_bytes().unwrap();
        prop_assert_eq!(&bytes, &t.to_csv_bytes().unwrap());
        let mut rdr = csv::ReaderBuilder::new().from_reader(bytes.as_slice());
        let back: Vec<csv::StringRecord> = rdr.records().collect::<Result<_, _>>().unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (rec, row) in back.iter().zip(&rows) {
            prop_assert_eq!(rec.len(), 3);
            for (field, c) in rec.iter().zip(row) {
                match c {
                    Cell::Float(x) => prop_assert_eq!(field.parse::<f64>().unwrap(), *x),
                    Cell::Int(i) => prop_assert_eq!(field.parse::<i64>().unwrap(), *i),
                    Cell::Text(s) => prop_assert_eq!(field, s.as_str()),
                    Cell::Empty => prop_assert_eq!(field, ""),
                }
            }
        }
    }
}

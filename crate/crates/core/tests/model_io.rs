mod common;

use macjscc::format::{parse_model, serialize_model};
use macjscc::paperex::{build_paper_model, fixture, FIXTURE_NAME};
use macjscc::Error;
use proptest::prelude::*;

const EXAMPLE_FILE: &str = include_str!("data/paper-example.model");

#[test]
fn example_file_matches_builder() {
    let parsed = parse_model(EXAMPLE_FILE).unwrap();
    assert_eq!(parsed, build_paper_model());
    assert_eq!(Some(parsed.clone()), fixture(FIXTURE_NAME));
    assert_eq!(parsed.channel.rows().count(), 36);
    assert!(parsed.validate().is_empty());
}

#[test]
fn example_file_with_thresholds() {
    let text = format!("{EXAMPLE_FILE}\n[thresholds]\ngamma1 = 0.8159\ngamma2 = 0.7057\n");
    let m = parse_model(&text).unwrap();
    assert_eq!(m.policy.gamma, Some([0.8159, 0.7057]));
}

#[test]
fn broken_example_rows_are_reported() {
    let text = EXAMPLE_FILE.replacen("row = 0.49 0.49 0.01 0.01", "row = 0.49 0.49 0.01 0.02", 1);
    match parse_model(&text) {
        Err(Error::ProbabilitySum { row, residual, .. }) => {
            assert_eq!(row, 5);
            assert!((residual - 0.01).abs() < 1e-12);
        }
        other => panic!("unexpected {other:?}"),
    }
    let short = EXAMPLE_FILE.replacen("row = 0.832 0.056 0.056 0.056", "", 1);
    assert!(matches!(parse_model(&short), Err(Error::Dimension(_))));
    let missing = EXAMPLE_FILE.replace("[source.2]", "[source.1]");
    assert!(matches!(parse_model(&missing), Err(Error::Syntax { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn serialized_models_round_trip(seed in any::<u64>(), g in proptest::option::of((0.0f64..=1.0, 0.0f64..=1.0))) {
        let mut m = common::random_model(seed, seed % 3 == 0);
        m.policy.gamma = g.map(|(a, b)| [a, b]);
        let text = serialize_model(&m);
        let back = parse_model(&text).unwrap();
        prop_assert!(back.validate().is_empty());
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(serialize_model(&back), text);
    }
}

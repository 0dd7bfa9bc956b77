use proptest::prelude::*;
use werner_cli::report::{Field, Report, Section, Value};
use werner_core::Warning;

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::Bool),
        any::<i64>().prop_map(Value::Int),
        any::<f64>().prop_map(Value::num),
        "[ -~]{0,12}".prop_map(Value::Text),
    ]
}

fn report() -> impl Strategy<Value = Report> {
    let section = ("[a-z ]{1,10}", 1usize..4).prop_flat_map(|(title, width)| {
        prop::collection::vec(prop::collection::vec(value(), width), 0..4).prop_map(move |rows| Section {
            title: title.clone(),
            columns: (0..width).map(|c| format!("c{c}")).collect(),
            rows,
        })
    });
    (
        "[a-z]{1,8}",
        any::<Option<u64>>(),
        any::<Option<u64>>(),
        prop::collection::vec(("[a-z]{1,6}", value()).prop_map(|(key, value)| Field { key, value }), 0..4),
        prop::collection::vec(section, 0..3),
        prop::collection::vec(("[a-z-]{1,8}", "[ -~]{0,20}").prop_map(|(n, m)| Warning::new(n, m)), 0..3),
    )
        .prop_map(|(command, seed, timestamp, inputs, sections, warnings)| Report {
            command,
            version: "0.1.0".into(),
            seed,
            timestamp,
            inputs,
            sections,
            warnings,
        })
}

proptest! {
    #[test]
    fn structured_round_trip(r in report()) {
        prop_assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn numbers_have_at_most_twelve_digits(x in any::<f64>()) {
        if let Value::Num(v) = Value::num(x) {
            let digits: String = format!("{v:e}").split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect();
            prop_assert!(digits.trim_start_matches('0').len() <= 12, "{v}");
            prop_assert!((v - x).abs() <= 1e-11 * x.abs());
        }
    }
}

#[test]
fn command_output_round_trips() {
    use clap::Parser;
    let cli = werner_cli::args::Cli::parse_from(["werner", "examples", "--restarts", "4"]);
    let r = werner_cli::execute(&cli).unwrap();
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
}

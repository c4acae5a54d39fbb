//! Printer/parser round-trips for models and LTL formulas.

use std::path::Path;

use containment_core::ingest::{parse_dsl, parse_json, print_dsl, print_json};
use containment_core::ltl::{generate_properties, parse_ltl, LtlFormula};
use containment_core::model::{ActivityModel, Node};
use containment_core::random_model::{random_model, RandomModelConfig};
use proptest::prelude::*;

fn with_names(m: &ActivityModel, names: &[String]) -> ActivityModel {
    let nodes = m
        .nodes()
        .iter()
        .zip(names.iter().cycle())
        .map(|(n, name)| {
            if name.is_empty() {
                n.clone()
            } else {
                Node::new(n.id.clone(), n.kind).with_name(name.clone())
            }
        })
        .collect();
    ActivityModel::new(m.name(), nodes, m.edges().to_vec())
}

fn formula() -> impl Strategy<Value = LtlFormula> {
    let leaf = prop_oneof![
        Just(LtlFormula::True),
        Just(LtlFormula::False),
        "[A-Za-z][A-Za-z0-9_]{0,6}"
            .prop_filter("not an operator", |s| parse_ltl(s) == Ok(LtlFormula::atom(s.clone())))
            .prop_map(LtlFormula::atom),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(LtlFormula::not),
            inner.clone().prop_map(LtlFormula::next),
            inner.clone().prop_map(LtlFormula::globally),
            inner.clone().prop_map(LtlFormula::finally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::xor(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| LtlFormula::implies(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dsl_and_json_round_trip(
        seed in any::<u64>(),
        cyclic in any::<bool>(),
        names in proptest::collection::vec(prop_oneof![Just(String::new()), "[ -~]{1,12}"], 1..4),
    ) {
        let m = with_names(&random_model(seed, RandomModelConfig { max_nodes: 10, cyclic }), &names);
        let dsl = print_dsl(&m);
        let back = parse_dsl(&dsl, Path::new("random.behavior")).map_err(|e| TestCaseError::fail(format!("{e:?}\n{dsl}")))?;
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(print_dsl(&back), dsl);
        let json = print_json(&m);
        let back = parse_json(&json).map_err(|e| TestCaseError::fail(format!("{e:?}\n{json}")))?;
        prop_assert_eq!(&back, &m);
    }

    #[test]
    fn ltl_render_parse_round_trips(f in formula()) {
        let text = f.to_string();
        prop_assert_eq!(parse_ltl(&text).map_err(|e| TestCaseError::fail(format!("{e}: {text}")))?, f);
    }

    #[test]
    fn generated_properties_round_trip(seed in any::<u64>()) {
        let m = random_model(seed, RandomModelConfig::default());
        for p in &generate_properties(&m).unwrap() {
            prop_assert_eq!(parse_ltl(&p.formula.to_string()).unwrap(), p.formula.clone());
        }
    }
}

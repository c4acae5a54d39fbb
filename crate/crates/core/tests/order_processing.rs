use std::path::PathBuf;

use containment_core::checker::{check_all, eval_lasso, oracle_check, Checker};
use containment_core::ingest::{load_model, print_dsl, print_json, parse_dsl, parse_json};
use containment_core::ltl::{generate_properties, parse_ltl, render_ltlspec};
use containment_core::model::ActivityModel;
use containment_core::semantics::{build_system, reachable_states, simulate, TransitionSystem};
use containment_core::smv::{bundle_check_file, generate_smv, read_smv, render_smv};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn model(name: &str) -> ActivityModel {
    load_model(&fixture(name)).unwrap()
}

fn system(name: &str) -> TransitionSystem {
    build_system(&generate_smv(&model(name)).unwrap()).unwrap()
}

fn verdicts(low: &str) -> Vec<bool> {
    let props = generate_properties(&model("order_processing.behavior")).unwrap();
    check_all(&system(low), &props.formulas())
        .unwrap()
        .into_iter()
        .map(|v| v.unwrap().holds)
        .collect()
}

#[test]
fn high_level_properties_match_golden() {
    let props = generate_properties(&model("order_processing.behavior")).unwrap();
    assert_eq!(render_ltlspec(&props), read("order_processing.ltl"));
}

#[test]
fn json_and_dsl_fixtures_agree() {
    for base in ["order_processing", "lowlevel_not_satisfied", "lowlevel_satisfied"] {
        let dsl = model(&format!("{base}.behavior"));
        let json = model(&format!("{base}.json"));
        assert_eq!(dsl, json, "{base}");
        assert_eq!(print_json(&dsl), read(&format!("{base}.json")));
        let reparsed = parse_dsl(&print_dsl(&dsl), &fixture("x")).unwrap();
        assert_eq!(reparsed, dsl);
        assert_eq!(parse_json(&print_json(&dsl)).unwrap(), dsl);
    }
}

#[test]
fn smv_matches_golden_and_rereads() {
    for base in ["lowlevel_not_satisfied", "lowlevel_satisfied"] {
        let module = generate_smv(&model(&format!("{base}.behavior"))).unwrap();
        let text = render_smv(&module);
        assert_eq!(text, read(&format!("{base}.smv")), "{base}");
        assert_eq!(read_smv(&text).unwrap(), module);
    }
}

#[test]
fn verdict_vectors() {
    assert_eq!(verdicts("lowlevel_not_satisfied.behavior"), [true, false, true, true, true, true]);
    assert_eq!(verdicts("lowlevel_satisfied.behavior"), [true; 6]);
}

#[test]
fn counterexample_passes_cancellation() {
    let sys = system("lowlevel_not_satisfied.behavior");
    let props = generate_properties(&model("order_processing.behavior")).unwrap();
    let checker = Checker::new(&sys, 10_000).unwrap();
    assert!(checker.space().len() < 10_000);
    let v = checker.check(&props.properties[1].formula).unwrap();
    let lasso = v.counterexample.unwrap();
    let reply = sys.atom_index("ReplyCreditCardNotOK").unwrap();
    let cancel = sys.atom_index("ConfirmOrderCancelation").unwrap();
    assert!(lasso.cycle.iter().all(|s| !sys.holds(s, reply)));
    assert!(lasso.prefix.iter().any(|s| sys.holds(s, cancel)));
    assert_eq!(eval_lasso(&sys, &v.property, &lasso), Ok(false));
}

#[test]
fn oracle_confirms_the_failure() {
    let sys = system("lowlevel_not_satisfied.behavior");
    let n = reachable_states(&sys, 10_000).unwrap().len();
    let f = parse_ltl("G (VerifyCreditCard -> F ReplyCreditCardNotOK xor F CreateOrderBusinessObject)").unwrap();
    assert!(!oracle_check(&sys, &f, n).unwrap().holds);
}

#[test]
fn cancellation_trace() {
    let sys = system("lowlevel_not_satisfied.behavior");
    let trace = simulate(
        &sys,
        &[("DecisionNode1", "DecisionNode2"), ("DecisionNode2", "ConfirmOrderCancelation")],
    )
    .unwrap();
    let on: Vec<Vec<String>> = trace
        .iter()
        .map(|s| {
            sys.valuation(s)
                .into_iter()
                .filter(|(_, v)| v != "FALSE" && v != "undetermined")
                .map(|(k, v)| format!("{k}={v}"))
                .collect()
        })
        .collect();
    assert_eq!(
        on,
        vec![
            vec!["InitialNode1=TRUE"],
            vec!["ReceiveNewOrder=TRUE"],
            vec!["VerifyCreditCard=TRUE"],
            vec!["DecisionNode1=guard_DecisionNode1_DecisionNode2"],
            vec!["DecisionNode2=guard_DecisionNode2_ConfirmOrderCancelation"],
            vec!["ConfirmOrderCancelation=TRUE"],
            vec!["ActivityFinalNode2=TRUE"],
            vec![],
        ]
    );
}

#[test]
fn fork_branches_start_together() {
    let sys = system("lowlevel_satisfied.behavior");
    let trace = simulate(&sys, &[("DecisionNode1", "CreateOrderBusinessObject")]).unwrap();
    let ship = sys.atom_index("ShipOrder").unwrap();
    let charge = sys.atom_index("ChargeOrder").unwrap();
    let step = trace.iter().position(|s| sys.holds(s, ship)).unwrap();
    assert!(sys.holds(&trace[step], charge));
}

#[test]
fn bundles() {
    let props = generate_properties(&model("order_processing.behavior")).unwrap();
    let low = model("lowlevel_not_satisfied.behavior");
    let text = bundle_check_file(&low, &props).unwrap();
    assert!(text.starts_with("MODULE main\n"));
    assert!(text.ends_with(&read("order_processing.ltl")));
    let high_as_low = bundle_check_file(&model("order_processing.behavior"), &props);
    assert!(high_as_low.is_ok());
}

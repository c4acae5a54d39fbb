use thiserror::Error;

use super::{render_smv, Assign, CaseArm, Cond, SmvModule, Sort, Value, VarDecl, UNDETERMINED};
use crate::ltl::{render_ltlspec, PropertySet};
use crate::model::{guard_value, ActivityModel, NodeKind, ValidationReport};
use crate::names::is_reserved;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmvGenError {
    #[error("invalid model:\n{0}")]
    InvalidModel(ValidationReport),
    #[error("node id '{0}' is a reserved word and cannot be used as an SMV variable")]
    ReservedIdentifier(String),
    #[error("property atoms name no boolean variable of the low-level model: {}", .0.join(", "))]
    AtomMismatch(Vec<String>),
}

/// Condition under which node `i` receives a token: the predecessor's
/// variable, or the guard equality when the predecessor is a decision.
fn trigger(model: &ActivityModel, i: usize) -> Cond {
    let target = &model.nodes()[i].id;
    let mut terms: Vec<Cond> = model
        .predecessor_indices(i)
        .map(|p| {
            let pred = &model.nodes()[p];
            if pred.kind == NodeKind::Decision {
                Cond::Eq(pred.id.clone(), guard_value(&pred.id, target))
            } else {
                Cond::Var(pred.id.clone())
            }
        })
        .collect();
    if terms.len() == 1 {
        return terms.pop().expect("one term");
    }
    if model.nodes()[i].kind == NodeKind::Merge {
        Cond::Or(terms)
    } else {
        Cond::And(terms)
    }
}

/// Compiles every node to its variable and `init`/`next` assignment.
/// Cyclic models are accepted.
pub fn generate_smv(model: &ActivityModel) -> Result<SmvModule, SmvGenError> {
    let report = model.validate();
    if !report.is_valid() {
        return Err(SmvGenError::InvalidModel(report));
    }
    if let Some(bad) = model.nodes().iter().find(|n| is_reserved(&n.id)) {
        return Err(SmvGenError::ReservedIdentifier(bad.id.clone()));
    }

    let mut module = SmvModule::default();
    for (i, node) in model.nodes().iter().enumerate() {
        let a = node.id.clone();
        let keep = CaseArm::new(Cond::True, Value::Var(a.clone()));
        let (sort, init, next) = match node.kind {
            NodeKind::Initial => (
                Sort::Boolean,
                Value::Bool(true),
                vec![CaseArm::new(Cond::Var(a.clone()), Value::Bool(false)), keep],
            ),
            NodeKind::Decision => {
                let guards: Vec<String> = model
                    .successor_indices(i)
                    .map(|t| guard_value(&a, &model.nodes()[t].id))
                    .collect();
                let mut values = vec![UNDETERMINED.to_string()];
                values.extend(guards.iter().cloned());
                (
                    Sort::Scalar(values),
                    Value::Symbol(UNDETERMINED.into()),
                    vec![
                        CaseArm::new(trigger(model, i), Value::Choice(guards)),
                        CaseArm::new(
                            Cond::Neq(a.clone(), UNDETERMINED.into()),
                            Value::Symbol(UNDETERMINED.into()),
                        ),
                        keep,
                    ],
                )
            }
            _ => (
                Sort::Boolean,
                Value::Bool(false),
                vec![
                    CaseArm::new(trigger(model, i), Value::Bool(true)),
                    CaseArm::new(Cond::Var(a.clone()), Value::Bool(false)),
                    keep,
                ],
            ),
        };
        module.vars.push(VarDecl {
            name: a.clone(),
            sort,
        });
        module.assigns.push(Assign { var: a, init, next });
    }
    Ok(module)
}

/// The low-level module followed by the high-level `LTLSPEC` lines, ready
/// for an external checker.
pub fn bundle_check_file(low: &ActivityModel, props: &PropertySet) -> Result<String, SmvGenError> {
    let module = generate_smv(low)?;
    let mut missing: Vec<String> = Vec::new();
    for p in props {
        for atom in p.formula.atoms() {
            let boolean = module
                .vars
                .iter()
                .any(|v| v.name == atom && v.sort == Sort::Boolean);
            if !boolean && !missing.iter().any(|m| m == atom) {
                missing.push(atom.to_string());
            }
        }
    }
    if !missing.is_empty() {
        return Err(SmvGenError::AtomMismatch(missing));
    }
    Ok(render_smv(&module) + &render_ltlspec(props))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_dsl;
    use crate::ltl::generate_properties;
    use std::path::Path;

    fn model(text: &str) -> ActivityModel {
        parse_dsl(text, Path::new("t")).unwrap()
    }

    fn block(text: &str, var: &str) -> String {
        let start = text.find(&format!("init({var})")).unwrap();
        let end = start + text[start..].find("esac;\n").unwrap() + "esac;\n".len();
        text[start..end].to_string()
    }

    const BRANCHY: &str = "model M {
        initial I;
        action Pa;
        decision D;
        action Pb;
        action Pc;
        merge Mg;
        final Fin;
        I -> Pa;
        Pa -> D;
        D -> Pb [yes];
        D -> Pc [no];
        Pb -> Mg;
        Pc -> Mg;
        Mg -> Fin;
    }";

    #[test]
    fn initial_block() {
        let text = render_smv(&generate_smv(&model(BRANCHY)).unwrap());
        assert_eq!(
            block(&text, "I"),
            "init(I) := TRUE;\nnext(I) := case\n        I : FALSE;\n        TRUE : I;\n    esac;\n"
        );
    }

    #[test]
    fn decision_and_guarded_target_blocks() {
        let text = render_smv(&generate_smv(&model(BRANCHY)).unwrap());
        assert!(text.contains("    D : {undetermined, guard_D_Pb, guard_D_Pc};\n"));
        assert_eq!(
            block(&text, "D"),
            "init(D) := undetermined;\nnext(D) := case\n        Pa : {guard_D_Pb, guard_D_Pc};\n        D != undetermined : undetermined;\n        TRUE : D;\n    esac;\n"
        );
        assert_eq!(
            block(&text, "Pc"),
            "init(Pc) := FALSE;\nnext(Pc) := case\n        (D = guard_D_Pc) : TRUE;\n        Pc : FALSE;\n        TRUE : Pc;\n    esac;\n"
        );
        assert!(block(&text, "Mg").contains("        Pb | Pc : TRUE;\n"));
    }

    #[test]
    fn implicit_join_conjoins_inputs() {
        let m = model(
            "model M { initial I; fork Fk; action Pa; action Pb; final Fin;
             I -> Fk; Fk -> Pa; Fk -> Pb; Pa -> Fin; Pb -> Fin; }",
        );
        let text = render_smv(&generate_smv(&m).unwrap());
        assert!(block(&text, "Fin").contains("        Pa & Pb : TRUE;\n"));
    }

    #[test]
    fn layout_and_determinism() {
        let module = generate_smv(&model(BRANCHY)).unwrap();
        let text = render_smv(&module);
        assert!(text.starts_with("MODULE main\nVAR\n    I : boolean;\n"));
        assert!(!text.contains("LTLSPEC"));
        assert!(!text.contains('\r'));
        assert_eq!(text, render_smv(&module));
        assert_eq!(module.vars.len(), 7);
        assert_eq!(module.assigns.len(), 7);
    }

    #[test]
    fn cyclic_models_are_accepted() {
        let m = model(
            "model M { initial I; merge Mg; action Pa; decision D; final Fin;
             I -> Mg; Mg -> Pa; Pa -> D; D -> Mg [again]; D -> Fin [done]; }",
        );
        let text = render_smv(&generate_smv(&m).unwrap());
        assert!(block(&text, "Mg").contains("        I | (D = guard_D_Mg) : TRUE;\n"));
    }

    #[test]
    fn reserved_ids_are_rejected() {
        let m = model("model M { initial I; final F; I -> F; }");
        assert_eq!(
            generate_smv(&m).unwrap_err(),
            SmvGenError::ReservedIdentifier("F".into())
        );
    }

    #[test]
    fn bundle_appends_specs_and_checks_atoms() {
        let low = model(BRANCHY);
        let high = model("model H { initial I; action Pa; action Pb; final Fin; I -> Pa; Pa -> Pb; Pb -> Fin; }");
        let props = generate_properties(&high).unwrap();
        let text = bundle_check_file(&low, &props).unwrap();
        assert!(text.ends_with("LTLSPEC G (I -> F Pa)\nLTLSPEC G (Pa -> F Pb)\nLTLSPEC G (Pb -> F Fin)\n"));

        let other = model("model H { initial I; action Zz; action D; final Fin; I -> Zz; Zz -> D; D -> Fin; }");
        let props = generate_properties(&other).unwrap();
        assert_eq!(
            bundle_check_file(&low, &props).unwrap_err(),
            SmvGenError::AtomMismatch(vec!["Zz".into(), "D".into()])
        );
    }
}

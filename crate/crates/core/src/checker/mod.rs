//! LTL model checking over the explicit state space.
//!
//! [`check`] translates the negated property into a generalized Büchi
//! automaton, builds its product with the reachable states and looks for a
//! fair strongly connected component. [`oracle_check`] enumerates bounded
//! lassos instead and evaluates the property on each; it exists to
//! cross-check the former on small systems.

mod automaton;
mod oracle;
mod search;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ltl::LtlFormula;
use crate::semantics::{reachable_states, SemanticsError, State, StateSpace, TransitionSystem, DEFAULT_CAP};

pub use oracle::{eval_lasso, ORACLE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("'{0}' names a decision; properties may only mention boolean node variables")]
    DecisionAtom(String),
    #[error("the oracle handles at most {limit} reachable states, found {states}")]
    TooLarge { states: usize, limit: usize },
}

/// Ultimately periodic path: `prefix` followed by `cycle` repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lasso<S = State> {
    pub prefix: Vec<S>,
    #[serde(rename = "loop")]
    pub cycle: Vec<S>,
}

impl<S: PartialEq + Clone> Lasso<S> {
    /// Same infinite path with the shortest cycle and the shortest prefix.
    pub fn canonical(mut self) -> Lasso<S> {
        let n = self.cycle.len();
        if let Some(p) = (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.cycle[i] == self.cycle[i - p])) {
            self.cycle.truncate(p);
        }
        while self.prefix.last().is_some() && self.prefix.last() == self.cycle.last() {
            self.prefix.pop();
            self.cycle.rotate_right(1);
        }
        self
    }

    /// Number of distinct positions of the path.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    /// The state at every position, with the index where the cycle starts.
    pub fn positions(&self) -> (Vec<&S>, usize) {
        (self.prefix.iter().chain(&self.cycle).collect(), self.prefix.len())
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Lasso<T> {
        Lasso {
            prefix: self.prefix.iter().map(&f).collect(),
            cycle: self.cycle.iter().map(&f).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict<S = State> {
    pub property: LtlFormula,
    pub holds: bool,
    /// Present exactly when the property fails.
    pub counterexample: Option<Lasso<S>>,
}

/// Atom indices of a formula in the system, rejecting unknown names and
/// decision variables.
fn resolve_atoms(sys: &TransitionSystem, prop: &LtlFormula) -> Result<Vec<(String, usize)>, CheckError> {
    prop.atoms()
        .into_iter()
        .map(|a| match sys.atom_index(a) {
            Ok(i) => Ok((a.to_string(), i)),
            Err(SemanticsError::NotBoolean(name)) => Err(CheckError::DecisionAtom(name)),
            Err(e) => Err(e.into()),
        })
        .collect()
}

/// A system together with its reachable state space, shared by many
/// property checks.
#[derive(Debug)]
pub struct Checker<'s> {
    sys: &'s TransitionSystem,
    space: StateSpace,
}

impl<'s> Checker<'s> {
    pub fn new(sys: &'s TransitionSystem, cap: usize) -> Result<Checker<'s>, CheckError> {
        Ok(Checker {
            sys,
            space: reachable_states(sys, cap)?,
        })
    }

    pub fn system(&self) -> &TransitionSystem {
        self.sys
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn check(&self, prop: &LtlFormula) -> Result<Verdict, CheckError> {
        let atoms = resolve_atoms(self.sys, prop)?;
        let lookup = |a: &str| atoms.iter().find(|(n, _)| n == a).expect("resolved atom").1;
        let mut arena = automaton::Arena::default();
        let root = arena.convert(prop, false, &lookup);
        let aut = automaton::build(&arena, root);
        let counterexample = search::find_lasso(self.sys, &self.space, &aut).map(|(prefix, cycle)| {
            Lasso {
                prefix: prefix.into_iter().map(|i| self.space.states[i].clone()).collect(),
                cycle: cycle.into_iter().map(|i| self.space.states[i].clone()).collect(),
            }
            .canonical()
        });
        Ok(Verdict {
            property: prop.clone(),
            holds: counterexample.is_none(),
            counterexample,
        })
    }

    /// One result per property, in input order; checks run in parallel.
    pub fn check_all<'p>(
        &self,
        props: impl IntoIterator<Item = &'p LtlFormula>,
    ) -> Vec<Result<Verdict, CheckError>> {
        let props: Vec<&LtlFormula> = props.into_iter().collect();
        props.par_iter().map(|p| self.check(p)).collect()
    }

    /// Brute-force verdict over all lassos of at most `depth` positions.
    pub fn oracle(&self, prop: &LtlFormula, depth: usize) -> Result<Verdict, CheckError> {
        if self.space.len() > ORACLE_LIMIT {
            return Err(CheckError::TooLarge {
                states: self.space.len(),
                limit: ORACLE_LIMIT,
            });
        }
        let atoms = resolve_atoms(self.sys, prop)?;
        let counterexample = oracle::search(self.sys, &self.space, prop, &atoms, depth).map(|l| {
            l.map(|&i| self.space.states[i].clone())
        });
        Ok(Verdict {
            property: prop.clone(),
            holds: counterexample.is_none(),
            counterexample,
        })
    }
}

/// Decides `prop` on every path from the initial state.
pub fn check(sys: &TransitionSystem, prop: &LtlFormula) -> Result<Verdict, CheckError> {
    Checker::new(sys, DEFAULT_CAP)?.check(prop)
}

pub fn check_all<'p>(
    sys: &TransitionSystem,
    props: impl IntoIterator<Item = &'p LtlFormula>,
) -> Result<Vec<Result<Verdict, CheckError>>, CheckError> {
    Ok(Checker::new(sys, DEFAULT_CAP)?.check_all(props))
}

/// Exhaustive bounded check; agrees with [`check`] once `depth` reaches
/// the number of reachable product states. Acyclic models reach that bound
/// at one more than their reachable state count.
pub fn oracle_check(sys: &TransitionSystem, prop: &LtlFormula, depth: usize) -> Result<Verdict, CheckError> {
    Checker::new(sys, ORACLE_LIMIT)
        .map_err(|e| match e {
            CheckError::Semantics(SemanticsError::CapExceeded { .. }) => CheckError::TooLarge {
                states: ORACLE_LIMIT + 1,
                limit: ORACLE_LIMIT,
            },
            e => e,
        })?
        .oracle(prop, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_dsl;
    use crate::ltl::parse_ltl;
    use crate::semantics::build_system;
    use crate::smv::generate_smv;
    use std::path::Path;

    fn system(text: &str) -> TransitionSystem {
        let m = parse_dsl(text, Path::new("t")).unwrap();
        build_system(&generate_smv(&m).unwrap()).unwrap()
    }

    const BRANCHY: &str = "model M {
        initial I; action Pa; decision D; action Pb; action Pc; merge Mg; final Fin;
        I -> Pa; Pa -> D; D -> Pb [yes]; D -> Pc [no]; Pb -> Mg; Pc -> Mg; Mg -> Fin;
    }";

    fn verdict(sys: &TransitionSystem, f: &str) -> Verdict {
        check(sys, &parse_ltl(f).unwrap()).unwrap()
    }

    #[test]
    fn basic_verdicts() {
        let sys = system(BRANCHY);
        assert!(verdict(&sys, "G (I -> F Pa)").holds);
        assert!(verdict(&sys, "G (Pa -> F Pb xor F Pc)").holds);
        assert!(verdict(&sys, "G (Pa -> X X (Pb | Pc))").holds);
        assert!(verdict(&sys, "F G !Fin").holds);
        assert!(!verdict(&sys, "F Pb").holds);
        assert!(!verdict(&sys, "G !Fin").holds);
        assert!(verdict(&sys, "G (Fin -> G !Pa)").holds);
        assert!(verdict(&sys, "TRUE").holds);
        assert!(!verdict(&sys, "FALSE").holds);
    }

    #[test]
    fn counterexample_for_missing_branch() {
        let sys = system(BRANCHY);
        let v = verdict(&sys, "F Pb");
        let lasso = v.counterexample.unwrap();
        let pc = sys.atom_index("Pc").unwrap();
        assert!(lasso.prefix.iter().any(|s| sys.holds(s, pc)));
        assert_eq!(lasso.cycle.len(), 1);
        assert_eq!(eval_lasso(&sys, &v.property, &lasso), Ok(false));
    }

    #[test]
    fn vacuous_implication_holds() {
        let sys = system(BRANCHY);
        assert!(verdict(&sys, "G (Pb & Pc -> F I)").holds);
    }

    #[test]
    fn atoms_are_checked() {
        let sys = system(BRANCHY);
        assert_eq!(
            check(&sys, &parse_ltl("F Q").unwrap()).unwrap_err(),
            CheckError::Semantics(SemanticsError::UnknownVariable("Q".into()))
        );
        assert_eq!(
            check(&sys, &parse_ltl("F D").unwrap()).unwrap_err(),
            CheckError::DecisionAtom("D".into())
        );
    }

    #[test]
    fn check_all_keeps_order() {
        let sys = system(BRANCHY);
        let props: Vec<LtlFormula> = ["F Pb", "F Fin", "F Pc", "G TRUE"]
            .iter()
            .map(|f| parse_ltl(f).unwrap())
            .collect();
        let holds: Vec<bool> = check_all(&sys, &props)
            .unwrap()
            .into_iter()
            .map(|v| v.unwrap().holds)
            .collect();
        assert_eq!(holds, vec![false, true, false, true]);
        assert!(check_all(&sys, &[]).unwrap().is_empty());
    }

    #[test]
    fn oracle_agrees_on_small_cases() {
        let sys = system(BRANCHY);
        let depth = reachable_states(&sys, 100).unwrap().len() + 1;
        for f in ["F Pb", "G (Pa -> F Pb xor F Pc)", "F G !Fin", "G !Fin", "X X X Mg | X X X X Mg"] {
            let f = parse_ltl(f).unwrap();
            let a = check(&sys, &f).unwrap();
            let b = oracle_check(&sys, &f, depth).unwrap();
            assert_eq!(a.holds, b.holds, "{f}");
        }
    }

    #[test]
    fn canonical_lasso() {
        let l = Lasso {
            prefix: vec![1, 2, 3],
            cycle: vec![4, 3, 4, 3],
        }
        .canonical();
        assert_eq!(l, Lasso { prefix: vec![1, 2], cycle: vec![3, 4] });
    }
}

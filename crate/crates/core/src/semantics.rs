//! Synchronous-update transition system induced by an SMV module.
//!
//! Every variable evaluates its first matching case arm against the current
//! state; a nondeterministic choice yields one successor per value, and
//! several choices in one step yield their product.

use std::collections::HashMap;
use std::fmt::Write as _;

use indexmap::IndexMap;
use thiserror::Error;

use crate::model::guard_value;
use crate::smv::{Cond, SmvModule, Sort, Value};

/// Default bound on the number of reachable states.
pub const DEFAULT_CAP: usize = 1_000_000;

/// Variable name to printed value, in declaration order.
pub type Valuation = IndexMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("'{value}' is not a value of variable '{var}'")]
    UnknownValue { var: String, value: String },
    #[error("variable '{0}' is used as a boolean but is not one")]
    NotBoolean(String),
    #[error("variable '{0}' has no assignment")]
    MissingAssign(String),
    #[error("variable '{0}' is assigned more than once")]
    DuplicateAssign(String),
    #[error("no case arm of '{0}' applies")]
    NonTotal(String),
    #[error("state space exceeds the cap of {cap} states ({frontier} states still unexplored)")]
    CapExceeded { cap: usize, frontier: usize },
    #[error("decision '{0}' branches but no choice is left")]
    ChoicesExhausted(String),
    #[error("decision '{decision}' branches but the next choice is for '{chosen}'")]
    ChoiceMismatch { decision: String, chosen: String },
    #[error("'{target}' is not a branch of decision '{decision}'")]
    UnknownChoice { decision: String, target: String },
    #[error("{0} choice(s) left unused when the trace closed")]
    UnusedChoices(usize),
}

/// Packed valuation of all variables of one system.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(Box<[u64]>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    /// `["FALSE", "TRUE"]` for booleans, the declared list for scalars.
    pub values: Vec<String>,
    pub boolean: bool,
    offset: u32,
    width: u32,
}

#[derive(Debug, Clone)]
enum CCond {
    True,
    Is(usize, u32),
    Not(usize, u32),
    And(Vec<CCond>),
    Or(Vec<CCond>),
}

#[derive(Debug, Clone)]
enum CValue {
    Const(u32),
    Var(usize),
    Choice(Vec<u32>),
}

#[derive(Debug, Clone)]
struct CAssign {
    arms: Vec<(CCond, CValue)>,
}

/// Immutable after [`build_system`]; successor computation is pure.
#[derive(Debug, Clone)]
pub struct TransitionSystem {
    vars: Vec<Variable>,
    by_name: HashMap<String, usize>,
    assigns: Vec<CAssign>,
    initial: State,
    words: usize,
}

impl TransitionSystem {
    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Index of the boolean variable an LTL atom refers to.
    pub fn atom_index(&self, atom: &str) -> Result<usize, SemanticsError> {
        let i = self
            .variable_index(atom)
            .ok_or_else(|| SemanticsError::UnknownVariable(atom.to_string()))?;
        if !self.vars[i].boolean {
            return Err(SemanticsError::NotBoolean(atom.to_string()));
        }
        Ok(i)
    }

    pub fn initial(&self) -> &State {
        &self.initial
    }

    /// Raw value index: 0/1 for booleans, position in the value list for
    /// scalars (0 is `undetermined` for generated decisions).
    pub fn value(&self, state: &State, var: usize) -> u32 {
        let v = &self.vars[var];
        let word = (v.offset / 64) as usize;
        let shift = v.offset % 64;
        ((state.0[word] >> shift) & mask(v.width)) as u32
    }

    fn set(&self, words: &mut [u64], var: usize, value: u32) {
        let v = &self.vars[var];
        let word = (v.offset / 64) as usize;
        let shift = v.offset % 64;
        words[word] &= !(mask(v.width) << shift);
        words[word] |= u64::from(value) << shift;
    }

    /// Truth of an atom previously resolved by [`Self::atom_index`].
    pub fn holds(&self, state: &State, atom: usize) -> bool {
        self.value(state, atom) == 1
    }

    pub fn value_name(&self, state: &State, var: usize) -> &str {
        &self.vars[var].values[self.value(state, var) as usize]
    }

    pub fn valuation(&self, state: &State) -> Valuation {
        (0..self.vars.len())
            .map(|i| (self.vars[i].name.clone(), self.value_name(state, i).to_string()))
            .collect()
    }

    /// `name = value` pairs in declaration order.
    pub fn format_state(&self, state: &State) -> String {
        (0..self.vars.len())
            .map(|i| format!("{} = {}", self.vars[i].name, self.value_name(state, i)))
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn eval(&self, c: &CCond, s: &State) -> bool {
        match c {
            CCond::True => true,
            CCond::Is(v, x) => self.value(s, *v) == *x,
            CCond::Not(v, x) => self.value(s, *v) != *x,
            CCond::And(items) => items.iter().all(|c| self.eval(c, s)),
            CCond::Or(items) => items.iter().any(|c| self.eval(c, s)),
        }
    }

    /// Candidate next values for each variable.
    fn options(&self, s: &State) -> Result<Vec<Vec<u32>>, SemanticsError> {
        self.assigns
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let (_, value) = a
                    .arms
                    .iter()
                    .find(|(c, _)| self.eval(c, s))
                    .ok_or_else(|| SemanticsError::NonTotal(self.vars[i].name.clone()))?;
                Ok(match value {
                    CValue::Const(x) => vec![*x],
                    CValue::Var(v) => vec![self.value(s, *v)],
                    CValue::Choice(xs) => xs.clone(),
                })
            })
            .collect()
    }

    fn pack(&self, values: &[u32]) -> State {
        let mut words = vec![0u64; self.words];
        for (i, x) in values.iter().enumerate() {
            self.set(&mut words, i, *x);
        }
        State(words.into_boxed_slice())
    }

    /// All successors, ordered lexicographically by the chosen values with
    /// earlier variables most significant.
    pub fn successors(&self, s: &State) -> Result<Vec<State>, SemanticsError> {
        let options = self.options(s)?;
        let mut out = Vec::new();
        let mut pick = vec![0usize; options.len()];
        loop {
            let values: Vec<u32> = options.iter().zip(&pick).map(|(o, &k)| o[k]).collect();
            out.push(self.pack(&values));
            let mut i = options.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < options[i].len() {
                    break;
                }
                pick[i] = 0;
            }
        }
    }
}

fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

fn bits_for(count: usize) -> u32 {
    (usize::BITS - count.saturating_sub(1).leading_zeros()).max(1)
}

struct Compiler<'a> {
    vars: &'a [Variable],
    by_name: &'a HashMap<String, usize>,
}

impl Compiler<'_> {
    fn var(&self, name: &str) -> Result<usize, SemanticsError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| SemanticsError::UnknownVariable(name.to_string()))
    }

    fn value_of(&self, var: usize, value: &str) -> Result<u32, SemanticsError> {
        self.vars[var]
            .values
            .iter()
            .position(|v| v == value)
            .map(|p| p as u32)
            .ok_or_else(|| SemanticsError::UnknownValue {
                var: self.vars[var].name.clone(),
                value: value.to_string(),
            })
    }

    fn cond(&self, c: &Cond) -> Result<CCond, SemanticsError> {
        Ok(match c {
            Cond::True => CCond::True,
            Cond::Var(v) => {
                let i = self.var(v)?;
                if !self.vars[i].boolean {
                    return Err(SemanticsError::NotBoolean(v.clone()));
                }
                CCond::Is(i, 1)
            }
            Cond::Eq(v, x) => {
                let i = self.var(v)?;
                CCond::Is(i, self.value_of(i, x)?)
            }
            Cond::Neq(v, x) => {
                let i = self.var(v)?;
                CCond::Not(i, self.value_of(i, x)?)
            }
            Cond::And(items) => CCond::And(items.iter().map(|c| self.cond(c)).collect::<Result<_, _>>()?),
            Cond::Or(items) => CCond::Or(items.iter().map(|c| self.cond(c)).collect::<Result<_, _>>()?),
        })
    }

    fn value(&self, target: usize, v: &Value) -> Result<CValue, SemanticsError> {
        Ok(match v {
            Value::Bool(b) => CValue::Const(self.value_of(target, if *b { "TRUE" } else { "FALSE" })?),
            Value::Symbol(s) => CValue::Const(self.value_of(target, s)?),
            Value::Var(name) => {
                let i = self.var(name)?;
                if self.vars[i].values != self.vars[target].values {
                    return Err(SemanticsError::UnknownValue {
                        var: self.vars[target].name.clone(),
                        value: name.clone(),
                    });
                }
                CValue::Var(i)
            }
            Value::Choice(xs) => CValue::Choice(
                xs.iter()
                    .map(|x| self.value_of(target, x))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }
}

/// Compiles a module; every variable needs exactly one assignment.
pub fn build_system(module: &SmvModule) -> Result<TransitionSystem, SemanticsError> {
    let mut vars = Vec::with_capacity(module.vars.len());
    let mut by_name = HashMap::new();
    let mut offset = 0u32;
    for decl in &module.vars {
        let (values, boolean) = match &decl.sort {
            Sort::Boolean => (vec!["FALSE".to_string(), "TRUE".to_string()], true),
            Sort::Scalar(values) => (values.clone(), false),
        };
        let width = bits_for(values.len());
        // Keep each variable inside one word.
        if offset % 64 + width > 64 {
            offset = (offset / 64 + 1) * 64;
        }
        by_name.insert(decl.name.clone(), vars.len());
        vars.push(Variable {
            name: decl.name.clone(),
            values,
            boolean,
            offset,
            width,
        });
        offset += width;
    }
    let words = (offset as usize).div_ceil(64).max(1);

    let compiler = Compiler {
        vars: &vars,
        by_name: &by_name,
    };
    let mut slots: Vec<Option<(CValue, CAssign)>> = vec![None; vars.len()];
    for a in &module.assigns {
        let i = compiler.var(&a.var)?;
        if slots[i].is_some() {
            return Err(SemanticsError::DuplicateAssign(a.var.clone()));
        }
        let init = compiler.value(i, &a.init)?;
        let arms = a
            .next
            .iter()
            .map(|arm| Ok((compiler.cond(&arm.cond)?, compiler.value(i, &arm.value)?)))
            .collect::<Result<_, SemanticsError>>()?;
        slots[i] = Some((init, CAssign { arms }));
    }
    let mut inits = Vec::with_capacity(vars.len());
    let mut assigns = Vec::with_capacity(vars.len());
    for (i, slot) in slots.into_iter().enumerate() {
        let (init, assign) = slot.ok_or_else(|| SemanticsError::MissingAssign(vars[i].name.clone()))?;
        inits.push(init);
        assigns.push(assign);
    }

    let mut sys = TransitionSystem {
        vars,
        by_name,
        assigns,
        initial: State(vec![0; words].into_boxed_slice()),
        words,
    };
    let zero = sys.initial.clone();
    let mut values = Vec::with_capacity(inits.len());
    for (i, init) in inits.iter().enumerate() {
        values.push(match init {
            CValue::Const(x) => *x,
            CValue::Var(v) => sys.value(&zero, *v),
            CValue::Choice(_) => {
                return Err(SemanticsError::UnknownValue {
                    var: sys.vars[i].name.clone(),
                    value: "{..}".into(),
                })
            }
        });
    }
    sys.initial = sys.pack(&values);
    Ok(sys)
}

/// Reachable part of a system in BFS order; state 0 is the initial state.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub states: Vec<State>,
    pub index: HashMap<State, usize>,
    /// Successor indices per state, in [`TransitionSystem::successors`] order.
    pub successors: Vec<Vec<usize>>,
    pub transitions: usize,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Breadth-first closure from the initial state, failing once more than
/// `cap` states are found.
pub fn reachable_states(sys: &TransitionSystem, cap: usize) -> Result<StateSpace, SemanticsError> {
    let mut space = StateSpace {
        states: vec![sys.initial.clone()],
        index: HashMap::from([(sys.initial.clone(), 0)]),
        successors: Vec::new(),
        transitions: 0,
    };
    if cap == 0 {
        return Err(SemanticsError::CapExceeded { cap, frontier: 1 });
    }
    let mut next = 0;
    while next < space.states.len() {
        let succ = sys.successors(&space.states[next])?;
        let mut ids = Vec::with_capacity(succ.len());
        for s in succ {
            let id = match space.index.get(&s) {
                Some(&id) => id,
                None => {
                    if space.states.len() == cap {
                        return Err(SemanticsError::CapExceeded {
                            cap,
                            frontier: space.states.len() - next,
                        });
                    }
                    space.index.insert(s.clone(), space.states.len());
                    space.states.push(s);
                    space.states.len() - 1
                }
            };
            ids.push(id);
        }
        space.transitions += ids.len();
        space.successors.push(ids);
        next += 1;
    }
    Ok(space)
}

/// Runs the system from its initial state, resolving each branching
/// decision with the next `(decision, target)` choice. The trace ends
/// before the first state that repeats an earlier one.
pub fn simulate(sys: &TransitionSystem, choices: &[(&str, &str)]) -> Result<Vec<State>, SemanticsError> {
    let mut trace = vec![sys.initial.clone()];
    let mut seen = std::collections::HashSet::from([sys.initial.clone()]);
    let mut pending = choices.iter();
    loop {
        let current = trace.last().expect("trace is nonempty");
        let mut options = sys.options(current)?;
        for (i, opts) in options.iter_mut().enumerate() {
            if opts.len() < 2 {
                continue;
            }
            let decision = &sys.vars[i].name;
            let &(chosen, target) = pending
                .next()
                .ok_or_else(|| SemanticsError::ChoicesExhausted(decision.clone()))?;
            if chosen != decision {
                return Err(SemanticsError::ChoiceMismatch {
                    decision: decision.clone(),
                    chosen: chosen.to_string(),
                });
            }
            let wanted = guard_value(decision, target);
            let pos = sys.vars[i]
                .values
                .iter()
                .position(|v| *v == wanted)
                .filter(|p| opts.contains(&(*p as u32)))
                .ok_or_else(|| SemanticsError::UnknownChoice {
                    decision: decision.clone(),
                    target: target.to_string(),
                })?;
            *opts = vec![pos as u32];
        }
        let values: Vec<u32> = options.iter().map(|o| o[0]).collect();
        let next = sys.pack(&values);
        if !seen.insert(next.clone()) {
            let left = pending.count();
            if left > 0 {
                return Err(SemanticsError::UnusedChoices(left));
            }
            return Ok(trace);
        }
        trace.push(next);
    }
}

/// One line per state: `<index>: name = value, ...`.
pub fn dump_states(sys: &TransitionSystem, space: &StateSpace) -> String {
    let mut out = String::new();
    for (i, s) in space.states.iter().enumerate() {
        let _ = writeln!(out, "{i}: {}", sys.format_state(s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_dsl;
    use crate::smv::generate_smv;
    use std::path::Path;

    fn system(text: &str) -> TransitionSystem {
        let m = parse_dsl(text, Path::new("t")).unwrap();
        build_system(&generate_smv(&m).unwrap()).unwrap()
    }

    const MINIMAL: &str = "model M { initial I; final Fin; I -> Fin; }";

    #[test]
    fn minimal_model_has_three_states() {
        let sys = system(MINIMAL);
        let space = reachable_states(&sys, 100).unwrap();
        assert_eq!(space.len(), 3);
        assert_eq!(sys.format_state(&space.states[0]), "I = TRUE, Fin = FALSE");
        assert_eq!(sys.format_state(&space.states[1]), "I = FALSE, Fin = TRUE");
        assert_eq!(sys.format_state(&space.states[2]), "I = FALSE, Fin = FALSE");
        assert_eq!(space.successors[2], vec![2]);
        assert_eq!(space.transitions, 3);
    }

    #[test]
    fn cap_is_enforced() {
        let sys = system(MINIMAL);
        assert!(matches!(
            reachable_states(&sys, 1),
            Err(SemanticsError::CapExceeded { cap: 1, .. })
        ));
        assert!(reachable_states(&sys, 3).is_ok());
    }

    const BRANCHY: &str = "model M {
        initial I; action Pa; decision D; action Pb; action Pc; merge Mg; final Fin;
        I -> Pa; Pa -> D; D -> Pb [yes]; D -> Pc [no]; Pb -> Mg; Pc -> Mg; Mg -> Fin;
    }";

    #[test]
    fn decisions_branch_and_reset() {
        let sys = system(BRANCHY);
        let trace = simulate(&sys, &[("D", "Pc")]).unwrap();
        let lines: Vec<String> = trace.iter().map(|s| sys.format_state(s)).collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[2].contains("D = guard_D_Pc"));
        assert!(lines[3].contains("D = undetermined") && lines[3].contains("Pc = TRUE"));
        assert!(lines[5].contains("Fin = TRUE"));
        assert!(!lines[6].contains("TRUE"));

        let d_on = &trace[1];
        assert_eq!(sys.successors(d_on).unwrap().len(), 2);
    }

    #[test]
    fn simulate_reports_bad_choices() {
        let sys = system(BRANCHY);
        assert_eq!(
            simulate(&sys, &[]).unwrap_err(),
            SemanticsError::ChoicesExhausted("D".into())
        );
        assert!(matches!(
            simulate(&sys, &[("D", "Fin")]),
            Err(SemanticsError::UnknownChoice { .. })
        ));
        assert!(matches!(
            simulate(&sys, &[("Q", "Pb")]),
            Err(SemanticsError::ChoiceMismatch { .. })
        ));
        assert_eq!(
            simulate(&sys, &[("D", "Pb"), ("D", "Pb")]).unwrap_err(),
            SemanticsError::UnusedChoices(1)
        );
    }

    #[test]
    fn packing_handles_many_variables() {
        let mut text = String::from("model M { initial I;");
        for i in 0..80 {
            text.push_str(&format!(" action N{i};"));
        }
        text.push_str(" final Fin; I -> N0;");
        for i in 0..79 {
            text.push_str(&format!(" N{i} -> N{};", i + 1));
        }
        text.push_str(" N79 -> Fin; }");
        let sys = system(&text);
        let space = reachable_states(&sys, 1000).unwrap();
        assert_eq!(space.len(), 83);
        let fin = sys.atom_index("Fin").unwrap();
        assert!(sys.holds(&space.states[81], fin));
    }

    #[test]
    fn atoms_must_be_boolean() {
        let sys = system(BRANCHY);
        assert_eq!(sys.atom_index("D"), Err(SemanticsError::NotBoolean("D".into())));
        assert_eq!(sys.atom_index("Q"), Err(SemanticsError::UnknownVariable("Q".into())));
    }
}

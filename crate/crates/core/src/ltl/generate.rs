//! High-level model to LTL properties, one per control-flow primitive.
//!
//! | primitive | property |
//! |-----------|----------|
//! | sequence `A1 -> A2` | `G (A1 -> F A2)` |
//! | fork after `A`, branches `B1..Bn` | `G (A -> F B1 & ... & F Bn)` |
//! | join of `A1..An` into `B` | `(G (A1 & ... & An) -> F B)` |
//! | decision after `A`, branches `B1..Bn` | `G (A -> F B1 xor ... xor F Bn)` |
//! | merge of `A1..An` into `B` | `G (A1 | ... | An -> F B)` |
//!
//! Sequence properties link two non-control nodes joined by an edge. Control
//! nodes appear in a property only through their neighbours:
//!
//! * a branch target that is a decision expands to the `xor` chain of its own
//!   branches, any other target `T` contributes `F T`;
//! * an input `P` contributes the atom `P` unless it is a decision; a decision
//!   input is replaced by the consuming node's own atom, or, when the consumer
//!   is itself a decision, by the input decision's antecedent.
//!
//! Decision atoms therefore never occur in generated formulas.

use std::fmt;

use thiserror::Error;

use super::LtlFormula;
use crate::model::{ActivityModel, NodeKind, ValidationReport};
use crate::names::is_reserved;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Primitive {
    Sequence,
    Fork,
    Join,
    Decision,
    Merge,
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Property {
    pub formula: LtlFormula,
    /// Node that induced the property (the edge source for sequences).
    pub origin: String,
    pub primitive: Primitive,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertySet {
    pub properties: Vec<Property>,
}

impl PropertySet {
    pub fn len(&self) -> usize {
        self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Property> {
        self.properties.iter()
    }

    pub fn formulas(&self) -> Vec<LtlFormula> {
        self.properties.iter().map(|p| p.formula.clone()).collect()
    }
}

impl<'a> IntoIterator for &'a PropertySet {
    type Item = &'a Property;
    type IntoIter = std::slice::Iter<'a, Property>;

    fn into_iter(self) -> Self::IntoIter {
        self.properties.iter()
    }
}

/// How the join primitive is written.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum JoinMode {
    /// `(G (A1 & ... & An) -> F B)`.
    #[default]
    Globally,
    /// `G ((A1 & ... & An) -> F B)`.
    Simultaneous,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlGenError {
    #[error("invalid model:\n{0}")]
    InvalidModel(ValidationReport),
    #[error("loops unsupported in high-level models: '{0}' is part of a cycle")]
    Cyclic(String),
    #[error("node id '{0}' is a reserved word and cannot be used as an LTL atom")]
    ReservedIdentifier(String),
}

struct Generator<'m> {
    model: &'m ActivityModel,
    join_mode: JoinMode,
    out: Vec<Property>,
}

impl Generator<'_> {
    fn kind(&self, i: usize) -> NodeKind {
        self.model.nodes()[i].kind
    }

    fn atom(&self, i: usize) -> LtlFormula {
        LtlFormula::atom(&self.model.nodes()[i].id)
    }

    /// "Eventually `t` executes", expanding decisions into their branches.
    fn reach(&self, t: usize) -> LtlFormula {
        if self.kind(t) == NodeKind::Decision {
            LtlFormula::xor_all(self.model.successor_indices(t).map(|s| self.reach(s)))
                .expect("valid decisions have branches")
        } else {
            LtlFormula::finally(self.atom(t))
        }
    }

    fn input_terms(&self, n: usize) -> Vec<LtlFormula> {
        let mut terms: Vec<LtlFormula> = Vec::new();
        for p in self.model.predecessor_indices(n) {
            let term = match (self.kind(p), self.kind(n)) {
                (NodeKind::Decision, NodeKind::Decision) => self.conjunction_antecedent(p),
                (NodeKind::Decision, _) => self.atom(n),
                _ => self.atom(p),
            };
            if !terms.contains(&term) {
                terms.push(term);
            }
        }
        terms
    }

    fn conjunction_antecedent(&self, n: usize) -> LtlFormula {
        LtlFormula::and_all(self.input_terms(n)).expect("valid control nodes have inputs")
    }

    fn single_successor(&self, n: usize) -> usize {
        self.model
            .successor_indices(n)
            .next()
            .expect("valid joins and merges have one output")
    }

    fn emit(&mut self, n: usize, primitive: Primitive, formula: LtlFormula) {
        self.out.push(Property {
            formula,
            origin: self.model.nodes()[n].id.clone(),
            primitive,
        });
    }

    fn emit_control(&mut self, n: usize) {
        use LtlFormula as L;
        match self.kind(n) {
            NodeKind::Fork => {
                let branches = L::and_all(self.model.successor_indices(n).map(|s| self.reach(s)));
                let f = L::globally(L::implies(self.conjunction_antecedent(n), branches.unwrap()));
                self.emit(n, Primitive::Fork, f);
            }
            NodeKind::Decision => {
                let branches = L::xor_all(self.model.successor_indices(n).map(|s| self.reach(s)));
                let f = L::globally(L::implies(self.conjunction_antecedent(n), branches.unwrap()));
                self.emit(n, Primitive::Decision, f);
            }
            NodeKind::Join => {
                let inputs = self.conjunction_antecedent(n);
                let out = self.reach(self.single_successor(n));
                let f = match self.join_mode {
                    JoinMode::Globally => L::implies(L::globally(inputs), out),
                    JoinMode::Simultaneous => L::globally(L::implies(inputs, out)),
                };
                self.emit(n, Primitive::Join, f);
            }
            NodeKind::Merge => {
                let inputs = L::or_all(self.input_terms(n)).unwrap();
                let out = self.reach(self.single_successor(n));
                self.emit(n, Primitive::Merge, L::globally(L::implies(inputs, out)));
            }
            _ => {}
        }
    }

    /// Depth-first from the initial node over declaration-ordered edges.
    /// Control properties are emitted when their node is first entered,
    /// sequence properties when their edge is traversed.
    fn run(&mut self, initial: usize) {
        let mut visited = vec![false; self.model.nodes().len()];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        visited[initial] = true;
        self.emit_control(initial);
        stack.push((initial, 0));
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            let Some(&e) = self.model.out_edges(v).get(*pos) else {
                stack.pop();
                continue;
            };
            *pos += 1;
            let t = self
                .model
                .node_index(&self.model.edges()[e].target)
                .expect("validated edge");
            if !self.kind(v).is_structural() && !self.kind(t).is_structural() {
                let f = LtlFormula::globally(LtlFormula::implies(
                    self.atom(v),
                    LtlFormula::finally(self.atom(t)),
                ));
                self.emit(v, Primitive::Sequence, f);
            }
            if !visited[t] {
                visited[t] = true;
                self.emit_control(t);
                stack.push((t, 0));
            }
        }
    }
}

/// [`generate_properties_with`] using the tabulated join form.
pub fn generate_properties(model: &ActivityModel) -> Result<PropertySet, LtlGenError> {
    generate_properties_with(model, JoinMode::Globally)
}

/// Generates one property per primitive instance of a valid, acyclic model.
pub fn generate_properties_with(
    model: &ActivityModel,
    join_mode: JoinMode,
) -> Result<PropertySet, LtlGenError> {
    let report = model.validate();
    if !report.is_valid() {
        return Err(LtlGenError::InvalidModel(report));
    }
    if !model.is_acyclic() {
        return Err(LtlGenError::Cyclic(first_cyclic_node(model)));
    }
    let initial = model.initial_index().expect("validated model has an initial node");
    let mut g = Generator {
        model,
        join_mode,
        out: Vec::new(),
    };
    g.run(initial);
    for p in &g.out {
        if let Some(bad) = p.formula.atoms().into_iter().find(|a| is_reserved(a)) {
            return Err(LtlGenError::ReservedIdentifier(bad.to_string()));
        }
    }
    Ok(PropertySet { properties: g.out })
}

fn first_cyclic_node(model: &ActivityModel) -> String {
    // A node lies on a cycle iff it can reach itself through at least one edge.
    for (i, node) in model.nodes().iter().enumerate() {
        let back = model
            .successor_indices(i)
            .any(|s| model.reachable_from(s)[i]);
        if back {
            return node.id.clone();
        }
    }
    String::new()
}

/// One `LTLSPEC <formula>` line per property, each terminated by LF.
pub fn render_ltlspec(props: &PropertySet) -> String {
    props
        .iter()
        .map(|p| format!("LTLSPEC {}\n", p.formula))
        .collect()
}

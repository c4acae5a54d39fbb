//! Behavior-model graph shared by both abstraction levels.
//!
//! An [`ActivityModel`] is an ordered list of typed nodes plus an ordered
//! list of edges. Order is significant: it fixes adjacency order, which in
//! turn fixes property order, SMV declaration order and guard value order.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Initial,
    Final,
    Action,
    Fork,
    Join,
    Decision,
    Merge,
}

impl NodeKind {
    pub const ALL: [NodeKind; 7] = [
        NodeKind::Initial,
        NodeKind::Final,
        NodeKind::Action,
        NodeKind::Fork,
        NodeKind::Join,
        NodeKind::Decision,
        NodeKind::Merge,
    ];

    /// Keyword used for this kind in the DSL and in JSON.
    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Initial => "initial",
            NodeKind::Final => "final",
            NodeKind::Action => "action",
            NodeKind::Fork => "fork",
            NodeKind::Join => "join",
            NodeKind::Decision => "decision",
            NodeKind::Merge => "merge",
        }
    }

    pub fn from_keyword(word: &str) -> Option<NodeKind> {
        NodeKind::ALL.into_iter().find(|k| k.keyword() == word)
    }

    /// Control nodes (fork, join, decision, merge). They are transparent in
    /// sequence properties.
    pub fn is_structural(self) -> bool {
        matches!(
            self,
            NodeKind::Fork | NodeKind::Join | NodeKind::Decision | NodeKind::Merge
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Display name; equal to `id` unless set explicitly.
    pub name: String,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Node {
        let id = id.into();
        Node {
            name: id.clone(),
            id,
            kind,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Node {
        self.name = name.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub guard: Option<String>,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Edge {
        Edge {
            source: source.into(),
            target: target.into(),
            guard: None,
        }
    }

    pub fn guarded(
        source: impl Into<String>,
        target: impl Into<String>,
        guard: impl Into<String>,
    ) -> Edge {
        Edge {
            source: source.into(),
            target: target.into(),
            guard: Some(guard.into()),
        }
    }
}

/// Symbolic value naming the branch of `decision` that leads to `target`.
pub fn guard_value(decision: &str, target: &str) -> String {
    format!("guard_{decision}_{target}")
}

/// Checks the `[A-Za-z][A-Za-z0-9_]*` identifier rule.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown node '{0}'")]
    UnknownNode(String),
}

/// Validated or not, a model is immutable once built. Adjacency lists are
/// computed eagerly and follow edge declaration order.
#[derive(Debug, Clone)]
pub struct ActivityModel {
    name: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

impl PartialEq for ActivityModel {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for ActivityModel {}

impl ActivityModel {
    /// Builds a model without validating it. Duplicate ids resolve to their
    /// first declaration and dangling edges are left out of adjacency; both
    /// are reported by [`ActivityModel::validate`].
    pub fn new(name: impl Into<String>, nodes: Vec<Node>, edges: Vec<Edge>) -> ActivityModel {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            index.entry(node.id.clone()).or_insert(i);
        }
        let mut outgoing = vec![Vec::new(); nodes.len()];
        let mut incoming = vec![Vec::new(); nodes.len()];
        for (e, edge) in edges.iter().enumerate() {
            if let (Some(&s), Some(&t)) = (index.get(&edge.source), index.get(&edge.target)) {
                outgoing[s].push(e);
                incoming[t].push(e);
            }
        }
        ActivityModel {
            name: name.into(),
            nodes,
            edges,
            index,
            outgoing,
            incoming,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Edge indices leaving node `i`, in declaration order.
    pub fn out_edges(&self, i: usize) -> &[usize] {
        &self.outgoing[i]
    }

    /// Edge indices entering node `i`, in declaration order.
    pub fn in_edges(&self, i: usize) -> &[usize] {
        &self.incoming[i]
    }

    pub fn successor_indices(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.outgoing[i]
            .iter()
            .map(move |&e| self.index[&self.edges[e].target])
    }

    pub fn predecessor_indices(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.incoming[i]
            .iter()
            .map(move |&e| self.index[&self.edges[e].source])
    }

    pub fn successors(&self, id: &str) -> Result<Vec<&str>, ModelError> {
        let i = self
            .node_index(id)
            .ok_or_else(|| ModelError::UnknownNode(id.to_string()))?;
        Ok(self
            .successor_indices(i)
            .map(|j| self.nodes[j].id.as_str())
            .collect())
    }

    pub fn predecessors(&self, id: &str) -> Result<Vec<&str>, ModelError> {
        let i = self
            .node_index(id)
            .ok_or_else(|| ModelError::UnknownNode(id.to_string()))?;
        Ok(self
            .predecessor_indices(i)
            .map(|j| self.nodes[j].id.as_str())
            .collect())
    }

    /// Index of the first initial node, if any.
    pub fn initial_index(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.kind == NodeKind::Initial)
    }

    /// Guard label of an edge, synthesizing `guard_<decision>_<target>` for
    /// unlabeled decision branches.
    pub fn effective_guard(&self, edge: &Edge) -> Option<String> {
        match (&edge.guard, self.node(&edge.source)) {
            (Some(g), _) => Some(g.clone()),
            (None, Some(n)) if n.kind == NodeKind::Decision => {
                Some(guard_value(&edge.source, &edge.target))
            }
            _ => None,
        }
    }

    /// True iff the edge relation has no directed cycle.
    pub fn is_acyclic(&self) -> bool {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let mut mark = vec![Mark::New; self.nodes.len()];
        for root in 0..self.nodes.len() {
            if mark[root] != Mark::New {
                continue;
            }
            // (node, position in its out-edge list)
            let mut stack = vec![(root, 0usize)];
            mark[root] = Mark::Open;
            while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
                if let Some(&e) = self.outgoing[v].get(*pos) {
                    *pos += 1;
                    let w = self.index[&self.edges[e].target];
                    match mark[w] {
                        Mark::Open => return false,
                        Mark::New => {
                            mark[w] = Mark::Open;
                            stack.push((w, 0));
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[v] = Mark::Done;
                    stack.pop();
                }
            }
        }
        true
    }

    /// Node indices reachable from `start` (inclusive) along edge direction.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for w in self.successor_indices(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Reports every well-formedness violation. Never fails.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();

        if !is_identifier(&self.name) {
            v.push(Violation::new(
                Location::Model,
                format!("model name '{}' is not an identifier", self.name),
            ));
        }

        let mut seen_ids = HashSet::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let at = Location::Node(i, node.id.clone());
            if node.id.is_empty() {
                v.push(Violation::new(at.clone(), "node id is empty"));
            } else if !is_identifier(&node.id) {
                v.push(Violation::new(
                    at.clone(),
                    format!(
                        "node id '{}' is not an identifier ([A-Za-z][A-Za-z0-9_]*)",
                        node.id
                    ),
                ));
            }
            if !seen_ids.insert(node.id.as_str()) {
                v.push(Violation::new(
                    at.clone(),
                    format!("duplicate node id '{}'", node.id),
                ));
            }
            if node.name.is_empty() || node.name.chars().any(char::is_control) {
                v.push(Violation::new(
                    at,
                    format!("display name of '{}' is empty or contains control characters", node.id),
                ));
            }
        }

        let mut seen_edges = HashSet::new();
        for (e, edge) in self.edges.iter().enumerate() {
            let at = Location::Edge(e);
            for end in [&edge.source, &edge.target] {
                if !self.index.contains_key(end) {
                    v.push(Violation::new(
                        at.clone(),
                        format!("unknown node reference '{end}'"),
                    ));
                }
            }
            if let Some(guard) = &edge.guard {
                if let Some(src) = self.node(&edge.source) {
                    if src.kind != NodeKind::Decision {
                        v.push(Violation::new(
                            at.clone(),
                            format!(
                                "guard on edge {} -> {} but '{}' is a {} node, not a decision",
                                edge.source, edge.target, edge.source, src.kind
                            ),
                        ));
                    }
                }
                if guard.trim().is_empty()
                    || guard.trim() != guard
                    || guard.contains(']')
                    || guard.chars().any(char::is_control)
                {
                    v.push(Violation::new(
                        at.clone(),
                        "guard text must be nonempty, trimmed, single-line and must not contain ']'",
                    ));
                }
            }
            if !seen_edges.insert((edge.source.as_str(), edge.target.as_str())) {
                v.push(Violation::new(
                    at,
                    format!("duplicate edge {} -> {}", edge.source, edge.target),
                ));
            }
        }

        let initials: Vec<usize> = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == NodeKind::Initial)
            .map(|(i, _)| i)
            .collect();
        match initials.as_slice() {
            [] => v.push(Violation::new(Location::Model, "model has no initial node")),
            [_] => {}
            [_, rest @ ..] => {
                for &i in rest {
                    v.push(Violation::new(
                        Location::Node(i, self.nodes[i].id.clone()),
                        "model has more than one initial node",
                    ));
                }
            }
        }

        for (i, node) in self.nodes.iter().enumerate() {
            let ins = self.incoming[i].len();
            let outs = self.outgoing[i].len();
            let mut need = |ok: bool, what: &str, found: usize| {
                if !ok {
                    v.push(Violation::new(
                        Location::Node(i, node.id.clone()),
                        format!("{} node '{}' requires {what}, found {found}", node.kind, node.id),
                    ));
                }
            };
            match node.kind {
                NodeKind::Initial => {
                    need(ins == 0, "no incoming edges", ins);
                    need(outs == 1, "exactly 1 outgoing edge", outs);
                }
                NodeKind::Final => {
                    need(outs == 0, "no outgoing edges", outs);
                    need(ins >= 1, "≥1 incoming edge", ins);
                }
                NodeKind::Action => {
                    need(ins >= 1, "≥1 incoming edge", ins);
                    need(outs == 1, "exactly 1 outgoing edge", outs);
                }
                NodeKind::Fork | NodeKind::Decision => {
                    need(ins >= 1, "≥1 incoming edge", ins);
                    need(outs >= 2, "≥2 outgoing edges", outs);
                }
                NodeKind::Join | NodeKind::Merge => {
                    need(ins >= 2, "≥2 incoming edges", ins);
                    need(outs == 1, "exactly 1 outgoing edge", outs);
                }
            }
            if node.kind == NodeKind::Decision {
                let guarded = self.outgoing[i]
                    .iter()
                    .filter(|&&e| self.edges[e].guard.is_some())
                    .count();
                if guarded != 0 && guarded != outs {
                    v.push(Violation::new(
                        Location::Node(i, node.id.clone()),
                        format!(
                            "decision node '{}' mixes guarded and unguarded branches ({guarded} of {outs} guarded)",
                            node.id
                        ),
                    ));
                }
            }
        }

        if let Some(&init) = initials.first() {
            let reach = self.reachable_from(init);
            for (i, node) in self.nodes.iter().enumerate() {
                if !reach[i] {
                    v.push(Violation::new(
                        Location::Node(i, node.id.clone()),
                        format!("node '{}' is not reachable from the initial node", node.id),
                    ));
                }
            }
            let final_reached = self
                .nodes
                .iter()
                .enumerate()
                .any(|(i, n)| reach[i] && n.kind == NodeKind::Final);
            if !final_reached {
                v.push(Violation::new(
                    Location::Model,
                    "no final node is reachable from the initial node",
                ));
            }
        }

        ValidationReport { violations: v }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Model,
    /// Node position in declaration order, with its id.
    Node(usize, String),
    /// Edge position in declaration order.
    Edge(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Model => f.write_str("model"),
            Location::Node(_, id) => write!(f, "node '{id}'"),
            Location::Edge(e) => write!(f, "edge #{}", e + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: Location,
    pub message: String,
}

impl Violation {
    fn new(location: Location, message: impl Into<String>) -> Violation {
        Violation {
            location,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("model is valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> ActivityModel {
        ActivityModel::new(
            "M",
            vec![Node::new("I", NodeKind::Initial), Node::new("F", NodeKind::Final)],
            vec![Edge::new("I", "F")],
        )
    }

    fn messages(m: &ActivityModel) -> Vec<String> {
        m.validate().violations.into_iter().map(|v| v.message).collect()
    }

    #[test]
    fn minimal_chain_is_valid_and_acyclic() {
        let m = chain();
        assert!(m.validate().is_valid());
        assert!(m.is_acyclic());
        assert_eq!(m.predecessors("I").unwrap(), Vec::<&str>::new());
        assert_eq!(m.successors("I").unwrap(), vec!["F"]);
    }

    #[test]
    fn lone_initial_reports_missing_edge_and_final() {
        let m = ActivityModel::new("M", vec![Node::new("I", NodeKind::Initial)], vec![]);
        let msgs = messages(&m);
        assert_eq!(msgs.len(), 2, "{msgs:?}");
        assert!(msgs[0].contains("exactly 1 outgoing edge"));
        assert!(msgs[1].contains("no final node is reachable"));
    }

    #[test]
    fn decision_with_one_branch_is_rejected() {
        let m = ActivityModel::new(
            "M",
            vec![
                Node::new("I", NodeKind::Initial),
                Node::new("D", NodeKind::Decision),
                Node::new("F", NodeKind::Final),
            ],
            vec![Edge::new("I", "D"), Edge::new("D", "F")],
        );
        let msgs = messages(&m);
        assert_eq!(msgs.len(), 1);
        assert!(msgs[0].contains("decision node 'D' requires ≥2 outgoing edges"));
    }

    #[test]
    fn dangling_and_duplicate_references_are_reported() {
        let m = ActivityModel::new(
            "M",
            vec![
                Node::new("I", NodeKind::Initial),
                Node::new("F", NodeKind::Final),
                Node::new("F", NodeKind::Final),
            ],
            vec![Edge::new("I", "F"), Edge::new("I", "Nowhere")],
        );
        let report = m.validate();
        let msgs: Vec<_> = report.violations.iter().map(|v| v.message.as_str()).collect();
        assert!(msgs.contains(&"duplicate node id 'F'"));
        assert!(msgs.contains(&"unknown node reference 'Nowhere'"));
        assert!(report
            .violations
            .iter()
            .any(|v| v.location == Location::Edge(1)));
    }

    #[test]
    fn guard_outside_decision_and_mixed_guards() {
        let m = ActivityModel::new(
            "M",
            vec![
                Node::new("I", NodeKind::Initial),
                Node::new("D", NodeKind::Decision),
                Node::new("A", NodeKind::Action),
                Node::new("F", NodeKind::Final),
                Node::new("G", NodeKind::Final),
            ],
            vec![
                Edge::guarded("I", "D", "go"),
                Edge::guarded("D", "A", "yes"),
                Edge::new("D", "G"),
                Edge::new("A", "F"),
            ],
        );
        let msgs = messages(&m);
        assert!(msgs.iter().any(|m| m.contains("not a decision")));
        assert!(msgs.iter().any(|m| m.contains("mixes guarded and unguarded")));
    }

    #[test]
    fn effective_guard_synthesizes_labels() {
        let m = ActivityModel::new(
            "M",
            vec![
                Node::new("I", NodeKind::Initial),
                Node::new("D", NodeKind::Decision),
                Node::new("F", NodeKind::Final),
                Node::new("G", NodeKind::Final),
            ],
            vec![Edge::new("I", "D"), Edge::new("D", "F"), Edge::new("D", "G")],
        );
        assert!(m.validate().is_valid());
        assert_eq!(m.effective_guard(&m.edges()[1]).as_deref(), Some("guard_D_F"));
        assert_eq!(m.effective_guard(&m.edges()[0]), None);
    }

    #[test]
    fn unreachable_nodes_and_cycles() {
        let m = ActivityModel::new(
            "M",
            vec![
                Node::new("I", NodeKind::Initial),
                Node::new("M1", NodeKind::Merge),
                Node::new("A", NodeKind::Action),
                Node::new("D", NodeKind::Decision),
                Node::new("F", NodeKind::Final),
                Node::new("Orphan", NodeKind::Action),
            ],
            vec![
                Edge::new("I", "M1"),
                Edge::new("M1", "A"),
                Edge::new("A", "D"),
                Edge::new("D", "M1"),
                Edge::new("D", "F"),
                Edge::new("Orphan", "F"),
            ],
        );
        assert!(!m.is_acyclic());
        let msgs = messages(&m);
        assert!(msgs.iter().any(|m| m.contains("'Orphan' is not reachable")));
        assert!(msgs.iter().any(|m| m.contains("action node 'Orphan' requires ≥1 incoming")));
    }

    #[test]
    fn identifier_rule() {
        assert!(is_identifier("ShipOrder_2"));
        assert!(!is_identifier("2ShipOrder"));
        assert!(!is_identifier("_x"));
        assert!(!is_identifier("Ship-Order"));
        assert!(!is_identifier(""));
    }

    #[test]
    fn unknown_id_in_adjacency_query() {
        assert_eq!(
            chain().successors("Q"),
            Err(ModelError::UnknownNode("Q".into()))
        );
    }
}

//! Seeded generator of small valid activity models, built from nested
//! control-flow blocks. Used by property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ActivityModel, Edge, Node, NodeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomModelConfig {
    /// Upper bound on the node count, initial and final nodes included.
    pub max_nodes: usize,
    /// Allow loops built from a merge and a decision with a back edge.
    pub cyclic: bool,
}

impl Default for RandomModelConfig {
    fn default() -> Self {
        RandomModelConfig {
            max_nodes: 10,
            cyclic: false,
        }
    }
}

/// Pending flow into the next node: source id and guard, if the source is
/// a decision.
type Flow = (String, Option<String>);

struct Builder {
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    budget: usize,
}

impl Builder {
    fn add(&mut self, kind: NodeKind) -> String {
        let prefix = match kind {
            NodeKind::Initial => "Start",
            NodeKind::Final => "End",
            NodeKind::Action => "Act",
            NodeKind::Fork => "Fork",
            NodeKind::Join => "Join",
            NodeKind::Decision => "Dec",
            NodeKind::Merge => "Merge",
        };
        let n = self.nodes.iter().filter(|x| x.kind == kind).count();
        let id = format!("{prefix}{n}");
        self.nodes.push(Node::new(id.clone(), kind));
        self.budget -= 1;
        id
    }

    fn connect(&mut self, flows: &[Flow], target: &str) {
        for (src, guard) in flows {
            self.edges.push(Edge {
                source: src.clone(),
                target: target.to_string(),
                guard: guard.clone(),
            });
        }
    }

    fn node(&mut self, kind: NodeKind, flows: &[Flow]) -> String {
        let id = self.add(kind);
        self.connect(flows, &id);
        id
    }

    /// Branches of a fork or decision: each gets an action while the budget
    /// allows, except that at most one may be left empty.
    fn branches(&mut self, split: &str, guarded: bool, count: usize, reserve: usize) -> Vec<Flow> {
        let mut out = Vec::new();
        let mut empty_used = false;
        for b in 0..count {
            let guard = guarded.then(|| format!("b{b}"));
            let flow = (split.to_string(), guard);
            let can_fill = self.budget > reserve;
            let leave_empty = !empty_used && (!can_fill || self.rng.gen_bool(0.3));
            if leave_empty {
                empty_used = true;
                out.push(flow);
            } else {
                let a = self.node(NodeKind::Action, &[flow]);
                out.push((a, None));
            }
        }
        out
    }

    fn block(&mut self, flows: Vec<Flow>, cyclic: bool) -> Vec<Flow> {
        // One node is always kept back for the final node.
        let room = self.budget - 1;
        let mut choices = vec![0];
        if room >= 3 {
            choices.extend([1, 2, 3]);
        }
        if room >= 2 {
            choices.push(4);
        }
        if cyclic && room >= 3 {
            choices.push(5);
        }
        match *choices.choose(&mut self.rng).expect("nonempty") {
            0 => {
                let a = self.node(NodeKind::Action, &flows);
                vec![(a, None)]
            }
            // Forks are drawn twice as often as the other blocks.
            1 | 2 => {
                let fork = self.node(NodeKind::Fork, &flows);
                let reserve = if choices.len() > 1 { 2 } else { 1 };
                let width = self.rng.gen_range(2..=3);
                let ends = self.branches(&fork, false, width, reserve);
                if self.rng.gen_bool(0.5) && self.budget > 1 {
                    let join = self.node(NodeKind::Join, &ends);
                    vec![(join, None)]
                } else {
                    // Implicit join at the next node.
                    ends
                }
            }
            3 => {
                let dec = self.node(NodeKind::Decision, &flows);
                let width = self.rng.gen_range(2..=3);
                let ends = self.branches(&dec, true, width, 2);
                if self.budget > 1 && self.rng.gen_bool(0.8) {
                    let merge = self.node(NodeKind::Merge, &ends);
                    vec![(merge, None)]
                } else {
                    ends
                }
            }
            4 => {
                let dec = self.node(NodeKind::Decision, &flows);
                let exit = (dec.clone(), Some("exit".to_string()));
                self.node(NodeKind::Final, &[exit]);
                vec![(dec, Some("stay".to_string()))]
            }
            _ => {
                let merge = self.node(NodeKind::Merge, &flows);
                let body = self.node(NodeKind::Action, &[(merge.clone(), None)]);
                let dec = self.node(NodeKind::Decision, &[(body, None)]);
                self.connect(&[(dec.clone(), Some("again".to_string()))], &merge);
                vec![(dec, Some("done".to_string()))]
            }
        }
    }
}

/// Deterministic in `seed`; every result passes validation, and is acyclic
/// unless `config.cyclic` is set.
pub fn random_model(seed: u64, config: RandomModelConfig) -> ActivityModel {
    let max = config.max_nodes.max(2);
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(seed),
        nodes: Vec::new(),
        edges: Vec::new(),
        budget: max,
    };
    let start = b.add(NodeKind::Initial);
    let mut flows = vec![(start, None)];
    let target = b.rng.gen_range(2..=max);
    while b.budget > 1 && max - b.budget < target - 1 {
        flows = b.block(flows, config.cyclic);
    }
    b.node(NodeKind::Final, &flows);
    ActivityModel::new(format!("Random{seed}"), b.nodes, b.edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_models_are_valid() {
        for seed in 0..2000 {
            let m = random_model(seed, RandomModelConfig::default());
            let report = m.validate();
            assert!(report.is_valid(), "seed {seed}:\n{report}");
            assert!(m.nodes().len() <= 10);
            assert!(m.is_acyclic(), "seed {seed}");
        }
    }

    #[test]
    fn cyclic_mode_is_valid_and_sometimes_cyclic() {
        let mut cyclic = 0;
        for seed in 0..500 {
            let m = random_model(seed, RandomModelConfig { max_nodes: 10, cyclic: true });
            let report = m.validate();
            assert!(report.is_valid(), "seed {seed}:\n{report}");
            cyclic += usize::from(!m.is_acyclic());
        }
        assert!(cyclic > 50);
    }

    #[test]
    fn deterministic_in_seed() {
        let c = RandomModelConfig::default();
        assert_eq!(random_model(7, c), random_model(7, c));
    }

    #[test]
    fn covers_every_kind() {
        let mut seen = std::collections::HashSet::new();
        for seed in 0..200 {
            for n in random_model(seed, RandomModelConfig::default()).nodes() {
                seen.insert(n.kind);
            }
        }
        assert_eq!(seen.len(), NodeKind::ALL.len());
    }
}

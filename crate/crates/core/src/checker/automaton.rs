//! Negation normal form and the tableau construction of a generalized
//! Büchi automaton accepting exactly the models of a formula.

use std::collections::{BTreeSet, HashMap};

use crate::ltl::LtlFormula;

pub(crate) type Fid = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum Nnf {
    True,
    False,
    /// Atom index and polarity.
    Lit(usize, bool),
    And(Fid, Fid),
    Or(Fid, Fid),
    Next(Fid),
    Until(Fid, Fid),
    Release(Fid, Fid),
}

/// Hash-consed NNF subformulas.
#[derive(Debug, Default)]
pub(crate) struct Arena {
    pub nodes: Vec<Nnf>,
    ids: HashMap<Nnf, Fid>,
}

impl Arena {
    fn intern(&mut self, n: Nnf) -> Fid {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        self.nodes.push(n.clone());
        self.ids.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// NNF of `f` (or of its negation when `positive` is false). `atom`
    /// maps atom names to indices.
    pub fn convert(&mut self, f: &LtlFormula, positive: bool, atom: &impl Fn(&str) -> usize) -> Fid {
        use LtlFormula as L;
        let n = match f {
            L::True => if positive { Nnf::True } else { Nnf::False },
            L::False => if positive { Nnf::False } else { Nnf::True },
            L::Atom(a) => Nnf::Lit(atom(a), positive),
            L::Not(a) => return self.convert(a, !positive, atom),
            L::Next(a) => Nnf::Next(self.convert(a, positive, atom)),
            L::Globally(a) => {
                let a = self.convert(a, positive, atom);
                if positive {
                    let f = self.intern(Nnf::False);
                    Nnf::Release(f, a)
                } else {
                    let t = self.intern(Nnf::True);
                    Nnf::Until(t, a)
                }
            }
            L::Finally(a) => {
                let a = self.convert(a, positive, atom);
                if positive {
                    let t = self.intern(Nnf::True);
                    Nnf::Until(t, a)
                } else {
                    let f = self.intern(Nnf::False);
                    Nnf::Release(f, a)
                }
            }
            L::And(a, b) | L::Or(a, b) => {
                let (x, y) = (self.convert(a, positive, atom), self.convert(b, positive, atom));
                if matches!(f, L::And(..)) == positive {
                    Nnf::And(x, y)
                } else {
                    Nnf::Or(x, y)
                }
            }
            L::Implies(a, b) => {
                let x = self.convert(a, !positive, atom);
                let y = self.convert(b, positive, atom);
                if positive {
                    Nnf::Or(x, y)
                } else {
                    Nnf::And(x, y)
                }
            }
            L::Xor(a, b) => {
                // a xor b == (a & !b) | (!a & b); its negation swaps b's polarity.
                let ap = self.convert(a, true, atom);
                let an = self.convert(a, false, atom);
                let b1 = self.convert(b, !positive, atom);
                let b2 = self.convert(b, positive, atom);
                let l = self.intern(Nnf::And(ap, b1));
                let r = self.intern(Nnf::And(an, b2));
                Nnf::Or(l, r)
            }
        };
        self.intern(n)
    }
}

/// Tableau node: a state of the automaton.
#[derive(Debug, Clone)]
pub(crate) struct Node {
    /// Predecessor nodes; `INIT` marks an initial node.
    pub incoming: BTreeSet<usize>,
    pub old: BTreeSet<Fid>,
    pub next: BTreeSet<Fid>,
}

pub(crate) const INIT: usize = usize::MAX;

#[derive(Debug)]
pub(crate) struct Automaton {
    pub nodes: Vec<Node>,
    /// Literals each node requires of the current state.
    pub literals: Vec<Vec<(usize, bool)>>,
    /// One set of accepting node indices per Until subformula.
    pub acceptance: Vec<Vec<bool>>,
}

struct Pending {
    incoming: BTreeSet<usize>,
    new: BTreeSet<Fid>,
    old: BTreeSet<Fid>,
    next: BTreeSet<Fid>,
}

pub(crate) fn build(arena: &Arena, root: Fid) -> Automaton {
    let mut nodes: Vec<Node> = Vec::new();
    let mut stack = vec![Pending {
        incoming: BTreeSet::from([INIT]),
        new: BTreeSet::from([root]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];

    while let Some(mut p) = stack.pop() {
        let Some(&eta) = p.new.iter().next() else {
            if let Some(existing) = nodes.iter_mut().find(|n| n.old == p.old && n.next == p.next) {
                existing.incoming.extend(p.incoming);
                continue;
            }
            nodes.push(Node {
                incoming: p.incoming,
                old: p.old,
                next: p.next.clone(),
            });
            stack.push(Pending {
                incoming: BTreeSet::from([nodes.len() - 1]),
                new: p.next,
                old: BTreeSet::new(),
                next: BTreeSet::new(),
            });
            continue;
        };
        p.new.remove(&eta);
        if p.old.contains(&eta) {
            stack.push(p);
            continue;
        }
        match arena.nodes[eta] {
            Nnf::False => {}
            Nnf::True => {
                p.old.insert(eta);
                stack.push(p);
            }
            Nnf::Lit(a, pol) => {
                let contradiction = p
                    .old
                    .iter()
                    .any(|&o| arena.nodes[o] == Nnf::Lit(a, !pol));
                if !contradiction {
                    p.old.insert(eta);
                    stack.push(p);
                }
            }
            Nnf::And(x, y) => {
                p.old.insert(eta);
                for f in [x, y] {
                    if !p.old.contains(&f) {
                        p.new.insert(f);
                    }
                }
                stack.push(p);
            }
            Nnf::Next(x) => {
                p.old.insert(eta);
                p.next.insert(x);
                stack.push(p);
            }
            Nnf::Or(x, y) | Nnf::Until(x, y) | Nnf::Release(x, y) => {
                p.old.insert(eta);
                let (first_new, first_next, second_new): (Vec<Fid>, Option<Fid>, Vec<Fid>) =
                    match arena.nodes[eta] {
                        Nnf::Or(..) => (vec![x], None, vec![y]),
                        Nnf::Until(..) => (vec![x], Some(eta), vec![y]),
                        _ => (vec![y], Some(eta), vec![x, y]),
                    };
                let mut second = Pending {
                    incoming: p.incoming.clone(),
                    new: p.new.clone(),
                    old: p.old.clone(),
                    next: p.next.clone(),
                };
                for f in second_new {
                    if !second.old.contains(&f) {
                        second.new.insert(f);
                    }
                }
                for f in first_new {
                    if !p.old.contains(&f) {
                        p.new.insert(f);
                    }
                }
                if let Some(n) = first_next {
                    p.next.insert(n);
                }
                stack.push(second);
                stack.push(p);
            }
        }
    }

    let literals = nodes
        .iter()
        .map(|n| {
            n.old
                .iter()
                .filter_map(|&f| match arena.nodes[f] {
                    Nnf::Lit(a, pol) => Some((a, pol)),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let acceptance = (0..arena.nodes.len())
        .filter_map(|u| match arena.nodes[u] {
            Nnf::Until(_, b) => Some(
                nodes
                    .iter()
                    .map(|n| !n.old.contains(&u) || n.old.contains(&b))
                    .collect(),
            ),
            _ => None,
        })
        .collect();
    Automaton {
        nodes,
        literals,
        acceptance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_ltl;

    fn automaton(text: &str) -> (Arena, Automaton) {
        let f = parse_ltl(text).unwrap();
        let atoms = f.atoms().iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let mut arena = Arena::default();
        let root = arena.convert(&f, true, &|a| atoms.iter().position(|x| x == a).unwrap());
        let aut = build(&arena, root);
        (arena, aut)
    }

    #[test]
    fn nnf_pushes_negation_to_atoms() {
        let f = parse_ltl("!(G p -> X !q)").unwrap();
        let mut arena = Arena::default();
        let root = arena.convert(&f, true, &|a| if a == "p" { 0 } else { 1 });
        let Nnf::And(l, r) = arena.nodes[root].clone() else { panic!() };
        assert!(matches!(arena.nodes[l], Nnf::Release(..)));
        let Nnf::Next(q) = arena.nodes[r] else { panic!() };
        assert_eq!(arena.nodes[q], Nnf::Lit(1, true));
    }

    #[test]
    fn contradiction_has_no_nodes() {
        let (_, aut) = automaton("p & !p");
        assert!(aut.nodes.is_empty());
    }

    #[test]
    fn eventually_has_one_acceptance_set() {
        let (_, aut) = automaton("F p");
        assert_eq!(aut.acceptance.len(), 1);
        let accepting_with_p = aut
            .nodes
            .iter()
            .enumerate()
            .any(|(i, _)| aut.acceptance[0][i] && aut.literals[i] == vec![(0, true)]);
        assert!(accepting_with_p);
        assert!(aut.nodes.iter().any(|n| n.incoming.contains(&INIT)));
    }
}

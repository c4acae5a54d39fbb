//! Product of the state space with the automaton of the negated property,
//! and extraction of a fair lasso from it.

use std::collections::{HashMap, VecDeque};

use super::automaton::{Automaton, INIT};
use crate::semantics::{StateSpace, TransitionSystem};

struct Product {
    /// (Kripke state, automaton node) per product state, in BFS order.
    pairs: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

fn admits(sys: &TransitionSystem, space: &StateSpace, aut: &Automaton, s: usize, q: usize) -> bool {
    let state = &space.states[s];
    aut.literals[q].iter().all(|&(a, pol)| sys.holds(state, a) == pol)
}

fn build_product(sys: &TransitionSystem, space: &StateSpace, aut: &Automaton) -> Product {
    // Automaton successors: q -> q' when q is an incoming of q'.
    let mut aut_succ: Vec<Vec<usize>> = vec![Vec::new(); aut.nodes.len()];
    let mut initial = Vec::new();
    for (q2, n) in aut.nodes.iter().enumerate() {
        for &q in &n.incoming {
            if q == INIT {
                initial.push(q2);
            } else {
                aut_succ[q].push(q2);
            }
        }
    }

    let mut p = Product {
        pairs: Vec::new(),
        succ: Vec::new(),
        parent: Vec::new(),
    };
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for q in initial {
        if admits(sys, space, aut, 0, q) && !index.contains_key(&(0, q)) {
            index.insert((0, q), p.pairs.len());
            p.pairs.push((0, q));
            p.parent.push(None);
            queue.push_back(p.pairs.len() - 1);
        }
    }
    while let Some(id) = queue.pop_front() {
        let (s, q) = p.pairs[id];
        let mut out = Vec::new();
        for &s2 in &space.successors[s] {
            for &q2 in &aut_succ[q] {
                if !admits(sys, space, aut, s2, q2) {
                    continue;
                }
                let target = *index.entry((s2, q2)).or_insert_with(|| {
                    p.pairs.push((s2, q2));
                    p.parent.push(Some(id));
                    queue.push_back(p.pairs.len() - 1);
                    p.pairs.len() - 1
                });
                if !out.contains(&target) {
                    out.push(target);
                }
            }
        }
        // Successor lists are filled in BFS order, which is id order.
        debug_assert_eq!(p.succ.len(), id);
        p.succ.push(out);
    }
    p
}

/// Iterative Tarjan; returns the SCC id of every vertex.
fn strongly_connected(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut comps = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*k) {
                *k += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("scc stack");
                        on_stack[w] = false;
                        comp[w] = comps;
                        if w == v {
                            break;
                        }
                    }
                    comps += 1;
                }
            }
        }
    }
    comp
}

/// Shortest path of at least `min_edges` edges from `from` to a vertex
/// satisfying `goal`, staying inside component `c`. Returns the vertices
/// after `from`.
fn path_within(
    succ: &[Vec<usize>],
    comp: &[usize],
    c: usize,
    from: usize,
    min_edges: usize,
    goal: impl Fn(usize) -> bool,
) -> Vec<usize> {
    if min_edges == 0 && goal(from) {
        return Vec::new();
    }
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for &w in &succ[from] {
        if comp[w] == c && !parent.contains_key(&w) {
            parent.insert(w, from);
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut path = vec![v];
            let mut cur = v;
            while parent[&cur] != from {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return path;
        }
        for &w in &succ[v] {
            if comp[w] == c && !parent.contains_key(&w) {
                parent.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    unreachable!("goal lies in the same strongly connected component")
}

/// Kripke-state indices of a fair lasso `(prefix, cycle)`, if any.
pub(crate) fn find_lasso(
    sys: &TransitionSystem,
    space: &StateSpace,
    aut: &Automaton,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let p = build_product(sys, space, aut);
    let comp = strongly_connected(&p.succ);
    let comps = comp.iter().copied().max().map_or(0, |m| m + 1);

    let mut size = vec![0usize; comps];
    let mut self_loop = vec![false; comps];
    let mut hits = vec![vec![false; aut.acceptance.len()]; comps];
    for v in 0..p.pairs.len() {
        let c = comp[v];
        size[c] += 1;
        if p.succ[v].contains(&v) {
            self_loop[c] = true;
        }
        for (k, set) in aut.acceptance.iter().enumerate() {
            if set[p.pairs[v].1] {
                hits[c][k] = true;
            }
        }
    }
    let fair = |c: usize| (size[c] > 1 || self_loop[c]) && hits[c].iter().all(|&h| h);

    let entry = (0..p.pairs.len()).find(|&v| fair(comp[v]))?;
    let c = comp[entry];

    let mut prefix = Vec::new();
    let mut cur = p.parent[entry];
    while let Some(v) = cur {
        prefix.push(v);
        cur = p.parent[v];
    }
    prefix.reverse();

    let mut cycle = vec![entry];
    let mut at = entry;
    for set in &aut.acceptance {
        let step = path_within(&p.succ, &comp, c, at, 0, |v| set[p.pairs[v].1]);
        if let Some(&last) = step.last() {
            at = last;
        }
        cycle.extend(step);
    }
    let back = path_within(&p.succ, &comp, c, at, 1, |v| v == entry);
    cycle.extend(&back[..back.len() - 1]);

    Some((
        prefix.iter().map(|&v| p.pairs[v].0).collect(),
        cycle.iter().map(|&v| p.pairs[v].0).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tarjan_groups_cycles() {
        let succ = vec![vec![1], vec![2], vec![0, 3], vec![3], vec![]];
        let comp = strongly_connected(&succ);
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[2], comp[3]);
        assert_ne!(comp[3], comp[4]);
    }

    #[test]
    fn path_within_requires_an_edge_when_asked() {
        let succ = vec![vec![1], vec![0]];
        let comp = vec![0, 0];
        assert_eq!(path_within(&succ, &comp, 0, 0, 0, |v| v == 0), Vec::<usize>::new());
        assert_eq!(path_within(&succ, &comp, 0, 0, 1, |v| v == 0), vec![1, 0]);
        let succ = vec![vec![0]];
        assert_eq!(path_within(&succ, &[0], 0, 0, 1, |v| v == 0), vec![0]);
    }
}
